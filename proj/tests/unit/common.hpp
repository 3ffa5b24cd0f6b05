#pragma once

#include <functional>
#include <map>
#include <string>

#include "locklab/netlist.hpp"

namespace testutil {

inline std::string data_path(const std::string& rel) { return std::string(LOCKLAB_SOURCE_DIR) + "/" + rel; }

inline locklab::Circuit toy() { return locklab::read_bench_file(data_path("tests/data/toy.bench")); }

inline locklab::Circuit bench(const std::string& name) {
  return locklab::read_bench_file(data_path("benchmarks/" + name + ".bench"));
}

// Independent evaluator: recursion over the gate list by name, no topological order,
// no word packing.
using GateIndex = std::map<std::string, const locklab::Gate*>;

inline bool eval_recursive(const GateIndex& gates, const std::string& sig, const locklab::Assignment& in,
                           std::map<std::string, bool>& memo) {
  using locklab::GateKind;
  if (auto it = in.find(sig); it != in.end()) return it->second;
  if (auto it = memo.find(sig); it != memo.end()) return it->second;
  const locklab::Gate* g = gates.at(sig);
  std::vector<bool> v;
  for (const auto& f : g->fanins) v.push_back(eval_recursive(gates, f, in, memo));
  bool r = false;
  switch (g->kind) {
    case GateKind::And: r = true; for (bool b : v) r = r && b; break;
    case GateKind::Nand: r = true; for (bool b : v) r = r && b; r = !r; break;
    case GateKind::Or: for (bool b : v) r = r || b; break;
    case GateKind::Nor: for (bool b : v) r = r || b; r = !r; break;
    case GateKind::Xor: for (bool b : v) r = r != b; break;
    case GateKind::Xnor: for (bool b : v) r = r != b; r = !r; break;
    case GateKind::Not: r = !v[0]; break;
    case GateKind::Buff: r = v[0]; break;
    case GateKind::Const0: r = false; break;
    case GateKind::Const1: r = true; break;
  }
  memo[sig] = r;
  return r;
}

inline locklab::Assignment eval_reference(const locklab::Circuit& c, const locklab::Assignment& in) {
  GateIndex gates;
  for (const auto& g : c.gates()) gates[g.name] = &g;
  std::map<std::string, bool> memo;
  locklab::Assignment out;
  for (const auto& po : c.outputs()) out[po] = eval_recursive(gates, po, in, memo);
  return out;
}

inline locklab::Assignment random_assignment(const locklab::Circuit& c, locklab::Rng& rng) {
  locklab::Assignment a;
  for (const auto& pi : c.inputs()) a[pi] = rng.coin();
  return a;
}

inline locklab::BitVector random_bits(std::size_t width, locklab::Rng& rng) {
  locklab::BitVector v(width);
  for (std::size_t i = 0; i < width; ++i) v.set(i, rng.coin());
  return v;
}

}  // namespace testutil
