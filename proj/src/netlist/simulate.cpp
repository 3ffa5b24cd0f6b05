#include "locklab/error.hpp"
#include "locklab/netlist.hpp"

namespace locklab {

std::uint64_t eval_gate_word(GateKind kind, std::span<const std::uint64_t> in) {
  std::uint64_t v = 0;
  switch (kind) {
    case GateKind::And:
    case GateKind::Nand:
      v = ~std::uint64_t{0};
      for (auto w : in) v &= w;
      return kind == GateKind::Nand ? ~v : v;
    case GateKind::Or:
    case GateKind::Nor:
      for (auto w : in) v |= w;
      return kind == GateKind::Nor ? ~v : v;
    case GateKind::Xor:
    case GateKind::Xnor:
      for (auto w : in) v ^= w;
      return kind == GateKind::Xnor ? ~v : v;
    case GateKind::Not: return ~in[0];
    case GateKind::Buff: return in[0];
    case GateKind::Const0: return 0;
    case GateKind::Const1: return ~std::uint64_t{0};
  }
  return 0;
}

namespace {

void eval_all(const Circuit& c, std::vector<std::uint64_t>& values,
              std::span<const std::pair<SignalId, std::uint64_t>> forced) {
  std::vector<std::uint64_t> scratch;
  for (SignalId s : c.topo()) {
    auto fis = c.fanins(s);
    scratch.resize(fis.size());
    for (std::size_t i = 0; i < fis.size(); ++i) scratch[i] = values[fis[i]];
    values[s] = eval_gate_word(c.kind(s), scratch);
    for (const auto& [sig, word] : forced) {
      if (sig == s) values[s] = word;
    }
  }
}

}  // namespace

std::vector<std::uint64_t> simulate_words(const Circuit& c, std::span<const std::uint64_t> input_words) {
  return simulate_words(c, input_words, {});
}

std::vector<std::uint64_t> simulate_words(const Circuit& c, std::span<const std::uint64_t> input_words,
                                          std::span<const std::pair<SignalId, std::uint64_t>> forced) {
  if (input_words.size() != c.num_inputs()) {
    throw InterfaceError("simulate: expected " + std::to_string(c.num_inputs()) + " input words, got " +
                         std::to_string(input_words.size()));
  }
  std::vector<std::uint64_t> values(c.num_signals(), 0);
  std::copy(input_words.begin(), input_words.end(), values.begin());
  for (const auto& [sig, word] : forced) {
    if (c.is_input(sig)) values[sig] = word;
  }
  eval_all(c, values, forced);
  return values;
}

BitVector simulate(const Circuit& c, const BitVector& input) {
  if (input.width() != c.num_inputs()) {
    throw InterfaceError("simulate: input width " + std::to_string(input.width()) + " != PI count " +
                         std::to_string(c.num_inputs()));
  }
  std::vector<std::uint64_t> words(c.num_inputs());
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = input[i] ? 1 : 0;
  auto values = simulate_words(c, words);
  BitVector out(c.num_outputs());
  auto outs = c.output_ids();
  for (std::size_t j = 0; j < outs.size(); ++j) out.set(j, values[outs[j]] & 1);
  return out;
}

namespace {

BitVector to_input_vector(const Circuit& c, const Assignment& a) {
  BitVector v(c.num_inputs());
  for (std::size_t i = 0; i < c.num_inputs(); ++i) {
    auto it = a.find(c.inputs()[i]);
    if (it == a.end()) throw InterfaceError("simulate: missing value for primary input " + c.inputs()[i]);
    v.set(i, it->second);
  }
  return v;
}

Assignment to_output_assignment(const Circuit& c, const BitVector& out) {
  Assignment a;
  for (std::size_t j = 0; j < c.num_outputs(); ++j) a[c.outputs()[j]] = out[j];
  return a;
}

}  // namespace

Assignment simulate(const Circuit& c, const Assignment& input) {
  return to_output_assignment(c, simulate(c, to_input_vector(c, input)));
}

std::vector<BitVector> simulate_batch(const Circuit& c, std::span<const BitVector> inputs) {
  std::vector<BitVector> results;
  results.reserve(inputs.size());
  const std::size_t npi = c.num_inputs();
  std::vector<std::uint64_t> words(npi);
  for (std::size_t base = 0; base < inputs.size(); base += 64) {
    const std::size_t count = std::min<std::size_t>(64, inputs.size() - base);
    std::fill(words.begin(), words.end(), 0);
    for (std::size_t p = 0; p < count; ++p) {
      const BitVector& in = inputs[base + p];
      if (in.width() != npi) {
        throw InterfaceError("simulate_batch: pattern " + std::to_string(base + p) + " has width " +
                             std::to_string(in.width()));
      }
      for (std::size_t i = 0; i < npi; ++i) {
        if (in[i]) words[i] |= std::uint64_t{1} << p;
      }
    }
    auto values = simulate_words(c, words);
    auto outs = c.output_ids();
    for (std::size_t p = 0; p < count; ++p) {
      BitVector out(outs.size());
      for (std::size_t j = 0; j < outs.size(); ++j) out.set(j, (values[outs[j]] >> p) & 1);
      results.push_back(std::move(out));
    }
  }
  return results;
}

std::vector<Assignment> simulate_batch(const Circuit& c, std::span<const Assignment> inputs) {
  std::vector<BitVector> vectors;
  vectors.reserve(inputs.size());
  for (const auto& a : inputs) vectors.push_back(to_input_vector(c, a));
  std::vector<Assignment> results;
  results.reserve(inputs.size());
  for (const auto& out : simulate_batch(c, std::span<const BitVector>(vectors))) {
    results.push_back(to_output_assignment(c, out));
  }
  return results;
}

}  // namespace locklab
