#include <algorithm>
#include <bit>

#include "locklab/error.hpp"
#include "locklab/netlist.hpp"

namespace locklab {

Cone fanin_cone(const Circuit& c, std::string_view node) {
  auto root = c.find(node);
  if (!root) throw NetlistError("fanin_cone: unknown node " + std::string(node));
  std::vector<std::uint8_t> seen(c.num_signals(), 0);
  std::vector<SignalId> stack{*root};
  seen[*root] = 1;
  while (!stack.empty()) {
    SignalId s = stack.back();
    stack.pop_back();
    for (SignalId f : c.fanins(s)) {
      if (!seen[f]) {
        seen[f] = 1;
        stack.push_back(f);
      }
    }
  }
  Cone cone;
  for (SignalId s = 0; s < c.num_signals(); ++s) {
    if (!seen[s]) continue;
    (c.is_input(s) ? cone.inputs : cone.gates).push_back(c.name(s));
  }
  return cone;
}

std::size_t ConeSets::count(SignalId s) const {
  std::size_t n = 0;
  for (std::size_t w = 0; w < words_per_signal; ++w) n += std::popcount(bits[s * words_per_signal + w]);
  return n;
}

ConeSets cone_input_sets(const Circuit& c) {
  ConeSets sets;
  sets.words_per_signal = std::max<std::size_t>(1, (c.num_inputs() + 63) / 64);
  const std::size_t wps = sets.words_per_signal;
  sets.bits.assign(c.num_signals() * wps, 0);
  for (SignalId i = 0; i < c.num_inputs(); ++i) sets.bits[i * wps + i / 64] |= std::uint64_t{1} << (i % 64);
  for (SignalId s : c.topo()) {
    for (SignalId f : c.fanins(s)) {
      for (std::size_t w = 0; w < wps; ++w) sets.bits[s * wps + w] |= sets.bits[f * wps + w];
    }
  }
  return sets;
}

std::vector<std::size_t> cone_input_counts(const Circuit& c) {
  ConeSets sets = cone_input_sets(c);
  std::vector<std::size_t> counts(c.num_signals());
  for (SignalId s = 0; s < c.num_signals(); ++s) counts[s] = sets.count(s);
  return counts;
}

std::string select_target(const Circuit& c, std::size_t min_cone_pis, Rng& rng) {
  auto counts = cone_input_counts(c);
  std::vector<std::string> eligible;
  std::size_t widest = 0;
  for (SignalId po : c.output_ids()) {
    widest = std::max(widest, counts[po]);
    if (counts[po] >= min_cone_pis) eligible.push_back(c.name(po));
  }
  if (eligible.empty()) {
    throw InfeasibleError("no primary output has a cone with " + std::to_string(min_cone_pis) +
                              " primary inputs (max " + std::to_string(widest) + ")",
                          widest);
  }
  return eligible[rng.below(eligible.size())];
}

}  // namespace locklab
