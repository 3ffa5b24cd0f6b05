#include <unordered_set>

#include "locklab/error.hpp"
#include "locklab/netlist.hpp"

namespace locklab {

CircuitBuilder::CircuitBuilder(const Circuit& c) : inputs_(c.inputs()), outputs_(c.outputs()), gates_(c.gates()) {
  for (std::size_t i = 0; i < inputs_.size(); ++i) input_index_[inputs_[i]] = i;
  for (std::size_t i = 0; i < gates_.size(); ++i) gate_index_[gates_[i].name] = i;
}

bool CircuitBuilder::has(std::string_view name) const {
  const std::string key(name);
  return input_index_.count(key) || gate_index_.count(key);
}

bool CircuitBuilder::is_input(std::string_view name) const { return input_index_.count(std::string(name)) != 0; }

bool CircuitBuilder::is_output(std::string_view name) const {
  return std::find(outputs_.begin(), outputs_.end(), name) != outputs_.end();
}

const Gate* CircuitBuilder::gate(std::string_view name) const {
  auto it = gate_index_.find(std::string(name));
  return it == gate_index_.end() ? nullptr : &gates_[it->second];
}

void CircuitBuilder::add_input(const std::string& name) {
  if (has(name)) throw NetlistError("name collision: " + name);
  input_index_[name] = inputs_.size();
  inputs_.push_back(name);
}

void CircuitBuilder::add_output(const std::string& name) {
  if (is_output(name)) throw NetlistError("duplicate primary output: " + name);
  outputs_.push_back(name);
}

std::string CircuitBuilder::fresh_name() {
  return names_.next([this](const std::string& n) { return has(n); });
}

std::string CircuitBuilder::add_gate(GateKind kind, std::vector<std::string> fanins, std::string name) {
  if (name.empty()) name = fresh_name();
  if (has(name)) throw NetlistError("name collision: " + name);
  if (!arity_ok(kind, fanins.size())) {
    throw NetlistError("gate " + name + ": " + std::string(to_string(kind)) + " with " +
                       std::to_string(fanins.size()) + " fanins");
  }
  for (const auto& f : fanins) {
    if (!has(f)) throw NetlistError("gate " + name + ": undefined fanin " + f);
  }
  gate_index_[name] = gates_.size();
  gates_.push_back(Gate{name, kind, std::move(fanins)});
  return name;
}

void CircuitBuilder::rename_gate(const std::string& from, const std::string& to) {
  auto it = gate_index_.find(from);
  if (it == gate_index_.end()) throw NetlistError("unknown gate: " + from);
  if (has(to)) throw NetlistError("name collision: " + to);
  const std::size_t idx = it->second;
  gate_index_.erase(it);
  gate_index_[to] = idx;
  gates_[idx].name = to;
}

void CircuitBuilder::replace_fanin(const std::string& gate_name, const std::string& from, const std::string& to) {
  auto it = gate_index_.find(gate_name);
  if (it == gate_index_.end()) throw NetlistError("unknown gate: " + gate_name);
  for (auto& f : gates_[it->second].fanins) {
    if (f == from) f = to;
  }
}

void CircuitBuilder::rewire_consumers(const std::string& from, const std::string& to, const std::string& skip) {
  for (auto& g : gates_) {
    if (g.name == skip) continue;
    for (auto& f : g.fanins) {
      if (f == from) f = to;
    }
  }
}

void CircuitBuilder::make_constant(const std::string& gate_name, bool value) {
  auto it = gate_index_.find(gate_name);
  if (it == gate_index_.end()) throw NetlistError("unknown gate: " + gate_name);
  Gate& g = gates_[it->second];
  g.kind = value ? GateKind::Const1 : GateKind::Const0;
  g.fanins.clear();
}

bool CircuitBuilder::depends_on(const std::string& signal, const std::string& node) const {
  std::unordered_set<std::string> seen{signal};
  std::vector<std::string> stack{signal};
  while (!stack.empty()) {
    std::string s = std::move(stack.back());
    stack.pop_back();
    if (s == node) return true;
    const Gate* g = gate(s);
    if (!g) continue;
    for (const auto& f : g->fanins) {
      if (seen.insert(f).second) stack.push_back(f);
    }
  }
  return false;
}

Circuit CircuitBuilder::build() const { return Circuit(inputs_, outputs_, gates_); }

std::string splice_xor(CircuitBuilder& b, const std::string& node, const std::string& other,
                       const std::string& fresh, GateKind kind) {
  if (!b.has(node)) throw NetlistError("splice: unknown node " + node);
  if (!b.has(other)) throw NetlistError("splice: unknown signal " + other);
  if (b.has(fresh)) throw NetlistError("name collision: " + fresh);
  if (kind != GateKind::Xor && kind != GateKind::Xnor) throw NetlistError("splice: kind must be XOR or XNOR");
  if (b.depends_on(other, node)) {
    throw NetlistError("splice would create a cycle: " + other + " depends on " + node);
  }
  if (b.is_output(node)) {
    if (b.is_input(node)) throw NetlistError("splice: " + node + " is both a primary input and output");
    // Keep the PO name on the new gate; the old driver moves to `fresh`. Readers
    // of `node` keep the name and so see the spliced value.
    b.rename_gate(node, fresh);
    b.add_gate(kind, {fresh, other}, node);
    return node;
  }
  b.add_gate(kind, {node, other}, fresh);
  b.rewire_consumers(node, fresh, fresh);
  return fresh;
}

Circuit splice_xor(const Circuit& c, const std::string& node, const std::string& other, const std::string& fresh) {
  CircuitBuilder b(c);
  splice_xor(b, node, other, fresh);
  return b.build();
}

}  // namespace locklab
