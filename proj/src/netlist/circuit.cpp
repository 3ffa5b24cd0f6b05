#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "locklab/error.hpp"
#include "locklab/netlist.hpp"

namespace locklab {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Nand: return "NAND";
    case GateKind::Nor: return "NOR";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buff: return "BUFF";
    case GateKind::Const0: return "CONST0";
    case GateKind::Const1: return "CONST1";
  }
  return "?";
}

std::optional<GateKind> gate_kind_from_string(std::string_view keyword) {
  std::string upper(keyword);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  static const std::unordered_map<std::string, GateKind> table = {
      {"AND", GateKind::And},   {"OR", GateKind::Or},         {"NAND", GateKind::Nand},
      {"NOR", GateKind::Nor},   {"XOR", GateKind::Xor},       {"XNOR", GateKind::Xnor},
      {"NOT", GateKind::Not},   {"BUFF", GateKind::Buff},     {"BUF", GateKind::Buff},
      {"CONST0", GateKind::Const0}, {"CONST1", GateKind::Const1},
  };
  auto it = table.find(upper);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

bool arity_ok(GateKind kind, std::size_t fanins) {
  switch (kind) {
    case GateKind::Not:
    case GateKind::Buff: return fanins == 1;
    case GateKind::Const0:
    case GateKind::Const1: return fanins == 0;
    default: return fanins >= 2;
  }
}

Circuit::Circuit() : Circuit({}, {}, {}) {}

Circuit::Circuit(std::vector<std::string> inputs, std::vector<std::string> outputs, std::vector<Gate> gates) {
  auto d = std::make_shared<Data>();
  d->inputs = std::move(inputs);
  d->outputs = std::move(outputs);
  d->gates = std::move(gates);

  const std::size_t npi = d->inputs.size();
  const std::size_t n = npi + d->gates.size();
  d->names.reserve(n);
  d->index.reserve(n);
  for (const auto& pi : d->inputs) {
    if (!d->index.emplace(pi, static_cast<SignalId>(d->names.size())).second) {
      throw NetlistError("duplicate signal definition: " + pi);
    }
    d->names.push_back(pi);
  }
  for (const auto& g : d->gates) {
    if (!d->index.emplace(g.name, static_cast<SignalId>(d->names.size())).second) {
      throw NetlistError("duplicate signal definition: " + g.name);
    }
    d->names.push_back(g.name);
  }

  d->kinds.assign(n, GateKind::Buff);
  d->fanin_offset.assign(n + 1, 0);
  for (std::size_t i = 0; i < d->gates.size(); ++i) {
    const Gate& g = d->gates[i];
    if (!arity_ok(g.kind, g.fanins.size())) {
      throw NetlistError("gate " + g.name + ": " + std::string(to_string(g.kind)) + " with " +
                         std::to_string(g.fanins.size()) + " fanins");
    }
    d->kinds[npi + i] = g.kind;
    d->fanin_offset[npi + i + 1] = static_cast<std::uint32_t>(g.fanins.size());
  }
  for (std::size_t s = 0; s < n; ++s) d->fanin_offset[s + 1] += d->fanin_offset[s];
  d->fanin_ids.resize(d->fanin_offset[n]);
  std::vector<std::uint32_t> fanout_count(n, 0);
  for (std::size_t i = 0; i < d->gates.size(); ++i) {
    const Gate& g = d->gates[i];
    const std::uint32_t first = d->fanin_offset[npi + i];
    std::uint32_t pos = first;
    for (const auto& f : g.fanins) {
      auto it = d->index.find(f);
      if (it == d->index.end()) throw NetlistError("gate " + g.name + ": undefined fanin " + f);
      d->fanin_ids[pos++] = it->second;
      if (std::find(d->fanin_ids.begin() + first, d->fanin_ids.begin() + pos - 1, it->second) ==
          d->fanin_ids.begin() + pos - 1) {
        ++fanout_count[it->second];
      }
    }
  }

  d->fanout_offset.assign(n + 1, 0);
  for (std::size_t s = 0; s < n; ++s) d->fanout_offset[s + 1] = d->fanout_offset[s] + fanout_count[s];
  d->fanout_ids.resize(d->fanout_offset[n]);
  std::vector<std::uint32_t> fill(d->fanout_offset.begin(), d->fanout_offset.end() - 1);
  for (std::size_t s = npi; s < n; ++s) {
    const auto first = d->fanin_ids.begin() + d->fanin_offset[s];
    for (auto p = d->fanin_offset[s]; p < d->fanin_offset[s + 1]; ++p) {
      const SignalId f = d->fanin_ids[p];
      if (std::find(first, d->fanin_ids.begin() + p, f) != d->fanin_ids.begin() + p) continue;
      d->fanout_ids[fill[f]++] = static_cast<SignalId>(s);
    }
  }

  d->is_output.assign(n, 0);
  std::unordered_set<std::string> seen_outputs;
  for (const auto& po : d->outputs) {
    auto it = d->index.find(po);
    if (it == d->index.end()) throw NetlistError("undefined primary output: " + po);
    if (!seen_outputs.insert(po).second) throw NetlistError("duplicate primary output: " + po);
    d->output_ids.push_back(it->second);
    d->is_output[it->second] = 1;
  }

  // Kahn's algorithm over gates.
  std::vector<std::uint32_t> pending(n, 0);
  std::vector<SignalId> ready;
  for (std::size_t s = npi; s < n; ++s) {
    pending[s] = d->fanin_offset[s + 1] - d->fanin_offset[s];
    for (auto p = d->fanin_offset[s]; p < d->fanin_offset[s + 1]; ++p) {
      if (d->fanin_ids[p] < npi) --pending[s];
    }
    if (pending[s] == 0) ready.push_back(static_cast<SignalId>(s));
  }
  std::reverse(ready.begin(), ready.end());
  d->topo.reserve(d->gates.size());
  while (!ready.empty()) {
    SignalId s = ready.back();
    ready.pop_back();
    d->topo.push_back(s);
    for (auto p = d->fanout_offset[s]; p < d->fanout_offset[s + 1]; ++p) {
      SignalId t = d->fanout_ids[p];
      // A gate may read `s` several times.
      for (auto q = d->fanin_offset[t]; q < d->fanin_offset[t + 1]; ++q) {
        if (d->fanin_ids[q] == s) --pending[t];
      }
      if (pending[t] == 0) ready.push_back(t);
    }
  }
  if (d->topo.size() != d->gates.size()) {
    for (std::size_t s = npi; s < n; ++s) {
      if (pending[s] != 0) throw NetlistError("combinational cycle through gate " + d->names[s]);
    }
  }
  data_ = std::move(d);
}

std::optional<SignalId> Circuit::find(std::string_view name) const {
  auto it = data_->index.find(std::string(name));
  if (it == data_->index.end()) return std::nullopt;
  return it->second;
}

SignalId Circuit::id(std::string_view name) const {
  auto s = find(name);
  if (!s) throw NetlistError("unknown signal: " + std::string(name));
  return *s;
}

std::span<const SignalId> Circuit::fanins(SignalId s) const {
  const auto& d = *data_;
  return {d.fanin_ids.data() + d.fanin_offset[s], d.fanin_offset[s + 1] - d.fanin_offset[s]};
}

std::span<const SignalId> Circuit::fanouts(SignalId s) const {
  const auto& d = *data_;
  return {d.fanout_ids.data() + d.fanout_offset[s], d.fanout_offset[s + 1] - d.fanout_offset[s]};
}

bool operator==(const Circuit& a, const Circuit& b) {
  return a.inputs() == b.inputs() && a.outputs() == b.outputs() && a.gates() == b.gates();
}

std::vector<std::string> topo_order(const Circuit& c) {
  std::vector<std::string> order;
  order.reserve(c.num_gates());
  for (SignalId s : c.topo()) order.push_back(c.name(s));
  return order;
}

}  // namespace locklab
