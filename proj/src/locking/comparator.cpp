#include <algorithm>

#include "locklab/error.hpp"
#include "locklab/locking.hpp"

namespace locklab {
namespace {

// Balanced tree of 2-input ANDs.
std::string and_tree(CircuitBuilder& b, std::vector<std::string> level) {
  while (level.size() > 1) {
    std::vector<std::string> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(b.add_gate(GateKind::And, {level[i], level[i + 1]}));
    if (level.size() % 2) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front();
}

}  // namespace

Comparator build_comparator(CircuitBuilder& b, const std::vector<std::string>& signals, const BitVector& pattern) {
  if (signals.size() != pattern.width()) {
    throw Error("comparator: " + std::to_string(signals.size()) + " signals vs pattern width " +
                std::to_string(pattern.width()));
  }
  if (signals.empty()) throw Error("comparator: empty signal list");
  Comparator cmp;
  cmp.taps.resize(signals.size());
  if (signals.size() == 1) {
    cmp.output = b.add_gate(pattern[0] ? GateKind::Buff : GateKind::Not, {signals[0]});
    cmp.taps[0] = {cmp.output};
    return cmp;
  }
  std::vector<std::string> literals;
  std::vector<bool> direct(signals.size());
  for (std::size_t i = 0; i < signals.size(); ++i) {
    if (pattern[i]) {
      literals.push_back(signals[i]);
      direct[i] = true;
    } else {
      literals.push_back(b.add_gate(GateKind::Not, {signals[i]}));
      cmp.taps[i] = {literals.back()};
    }
  }
  // A signal used directly is read by whichever AND picks up its literal.
  const std::size_t before = b.gates().size();
  cmp.output = and_tree(b, literals);
  for (std::size_t i = 0; i < signals.size(); ++i) {
    if (!direct[i]) continue;
    for (std::size_t g = before; g < b.gates().size(); ++g) {
      const Gate& gate = b.gates()[g];
      if (std::find(gate.fanins.begin(), gate.fanins.end(), signals[i]) != gate.fanins.end()) {
        cmp.taps[i].push_back(gate.name);
      }
    }
  }
  return cmp;
}

Comparator build_comparator(CircuitBuilder& b, const std::vector<std::string>& signals,
                            const std::vector<std::string>& keys) {
  if (signals.size() != keys.size()) {
    throw Error("comparator: " + std::to_string(signals.size()) + " signals vs " + std::to_string(keys.size()) +
                " keys");
  }
  if (signals.empty()) throw Error("comparator: empty signal list");
  Comparator cmp;
  std::vector<std::string> bits;
  for (std::size_t i = 0; i < signals.size(); ++i) {
    bits.push_back(b.add_gate(GateKind::Xnor, {signals[i], keys[i]}));
    cmp.taps.push_back({bits.back()});
  }
  cmp.output = and_tree(b, bits);
  return cmp;
}

std::pair<Circuit, std::string> build_comparator(const Circuit& c, const std::vector<std::string>& signals,
                                                 const BitVector& pattern) {
  CircuitBuilder b(c);
  auto cmp = build_comparator(b, signals, pattern);
  return {b.build(), cmp.output};
}

std::pair<Circuit, std::string> build_comparator(const Circuit& c, const std::vector<std::string>& signals,
                                                 const std::vector<std::string>& keys) {
  CircuitBuilder b(c);
  auto cmp = build_comparator(b, signals, keys);
  return {b.build(), cmp.output};
}

}  // namespace locklab
