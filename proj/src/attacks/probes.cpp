#include <chrono>
#include <cmath>
#include <set>

#include "interface.hpp"
#include "locklab/attacks.hpp"
#include "locklab/error.hpp"

namespace locklab {
namespace {

using Clock = std::chrono::steady_clock;

// Truth table of `node` over the PIs in `support` (pattern p sets support[j] to bit j of p).
std::vector<bool> truth_table(const Circuit& c, SignalId node, const std::vector<SignalId>& support) {
  const std::uint64_t patterns = 1ull << support.size();
  std::vector<bool> table(patterns);
  std::vector<std::uint64_t> in(c.num_inputs(), 0);
  for (std::uint64_t b = 0; b * 64 < patterns; ++b) {
    for (std::size_t j = 0; j < support.size(); ++j) in[support[j]] = detail::enumeration_word(j, b);
    const std::uint64_t word = simulate_words(c, in)[node];
    for (std::uint64_t p = b * 64; p < std::min(patterns, b * 64 + 64); ++p) table[p] = (word >> (p - b * 64)) & 1;
  }
  return table;
}

struct MappingScan {
  const Circuit& c;
  const ConeSets& cones;
  const std::vector<int>& key_slot;  // per PI: key index or -1
  std::size_t max_support;
  std::vector<std::set<SignalId>>& candidates;

  std::vector<SignalId> support(SignalId s) const {
    std::vector<SignalId> out;
    for (SignalId i = 0; i < c.num_inputs(); ++i) {
      if (cones.contains(s, i)) out.push_back(i);
    }
    return out;
  }

  // Records PI x as a candidate of key k when `s` equals x XOR k (or its
  // complement) under some setting of the other keys in its support. With
  // `only` set, k is restricted to that key PI.
  void examine(SignalId s, std::optional<SignalId> only, const std::vector<bool>* wanted_keys) {
    const auto sup = support(s);
    if (sup.size() > max_support || sup.size() < 2) return;
    std::vector<std::size_t> keys, data;
    for (std::size_t j = 0; j < sup.size(); ++j) (key_slot[sup[j]] >= 0 ? keys : data).push_back(j);
    if (keys.empty() || data.empty()) return;
    const auto table = truth_table(c, s, sup);
    for (std::size_t t : keys) {
      const int slot = key_slot[sup[t]];
      if (only && sup[t] != *only) continue;
      if (wanted_keys && !(*wanted_keys)[static_cast<std::size_t>(slot)]) continue;
      std::vector<std::size_t> others;
      for (std::size_t o : keys) {
        if (o != t) others.push_back(o);
      }
      for (std::uint64_t a = 0; a < (1ull << others.size()); ++a) {
        for (std::size_t x : data) {
          bool same = true, inverse = true;
          for (std::uint64_t p = 0; p < table.size() && (same || inverse); ++p) {
            bool fits = true;
            for (std::size_t o = 0; o < others.size() && fits; ++o) fits = ((p >> others[o]) & 1) == ((a >> o) & 1);
            if (!fits) continue;
            const bool expect = ((p >> x) & 1) != ((p >> t) & 1);
            if (table[p] != expect) same = false;
            if (table[p] == expect) inverse = false;
          }
          if (same || inverse) candidates[static_cast<std::size_t>(slot)].insert(sup[x]);
        }
      }
    }
  }
};

}  // namespace

std::string_view to_string(MappingMethod m) { return m == MappingMethod::Syntactic ? "syntactic" : "functional"; }

MappingReport mapping_probe(const Circuit& locked, const std::vector<std::string>& key_names, const MappingOptions& opt) {
  const auto io = detail::split_keys(locked, key_names);
  std::vector<int> key_slot(locked.num_inputs(), -1);
  for (std::size_t i = 0; i < io.keys.size(); ++i) key_slot[io.keys[i]] = static_cast<int>(i);
  const ConeSets cones = cone_input_sets(locked);
  std::vector<std::set<SignalId>> candidates(io.keys.size());
  MappingScan scan{locked, cones, key_slot, opt.max_support, candidates};

  MappingReport report;
  const bool syntactic = !opt.method || *opt.method == MappingMethod::Syntactic;
  if (syntactic) {
    // Two-input XOR/XNOR gates with a key as a direct operand are comparator bits.
    for (SignalId s : locked.topo()) {
      const GateKind k = locked.kind(s);
      const auto fin = locked.fanins(s);
      if ((k != GateKind::Xor && k != GateKind::Xnor) || fin.size() != 2) continue;
      for (SignalId f : fin) {
        if (locked.is_input(f) && key_slot[f] >= 0) scan.examine(s, f, nullptr);
      }
    }
  }
  if (!opt.method || *opt.method == MappingMethod::Functional) {
    std::vector<bool> wanted(io.keys.size(), true);
    bool any = false;
    for (std::size_t i = 0; i < io.keys.size(); ++i) {
      wanted[i] = candidates[i].empty();
      any = any || wanted[i];
    }
    if (any) {
      std::vector<std::size_t> before(io.keys.size());
      for (std::size_t i = 0; i < io.keys.size(); ++i) before[i] = candidates[i].size();
      for (SignalId s : locked.topo()) scan.examine(s, std::nullopt, &wanted);
      for (std::size_t i = 0; i < io.keys.size(); ++i) {
        if (candidates[i].size() != before[i]) report.method = MappingMethod::Functional;
      }
      if (!syntactic) report.method = MappingMethod::Functional;
    }
  }

  for (std::size_t i = 0; i < io.keys.size(); ++i) {
    KeyMapping km;
    km.key = key_names[i];
    for (SignalId pi : candidates[i]) km.candidates.push_back(locked.name(pi));
    if (!km.candidates.empty()) {
      ++report.resolved;
      report.raw_exponent += std::log2(static_cast<double>(km.candidates.size())) + 1.0;
    }
    report.keys.push_back(std::move(km));
  }
  report.ambiguity_exponent = std::min(report.raw_exponent, static_cast<double>(io.keys.size()));
  return report;
}

RemovalReport removal_probe(const Circuit& locked, const std::vector<std::string>& key_names, const Circuit& original,
                            const RemovalOptions& opt) {
  const auto start = Clock::now();
  const auto io = detail::match_interface(locked, key_names, original.inputs(), original.outputs());
  std::optional<Clock::time_point> deadline;
  if (opt.seconds) {
    deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*opt.seconds));
  }

  // Scan set: gates fed (transitively) by a key input that reach a primary output.
  const std::size_t n = locked.num_signals();
  std::vector<char> from_key(n, 0), to_po(n, 0);
  for (SignalId k : io.keys) from_key[k] = 1;
  for (SignalId s : locked.topo()) {
    for (SignalId f : locked.fanins(s)) from_key[s] = from_key[s] || from_key[f];
  }
  for (SignalId po : locked.output_ids()) to_po[po] = 1;
  const auto topo = locked.topo();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    if (!to_po[*it]) continue;
    for (SignalId f : locked.fanins(*it)) to_po[f] = 1;
  }
  std::vector<SignalId> scan;
  for (SignalId s : topo) {
    if (from_key[s] && to_po[s]) scan.push_back(s);
  }

  // Shared random stimulus for the cheap rejection pass.
  Rng rng(opt.seed);
  std::vector<std::vector<std::uint64_t>> stim, expected;
  for (unsigned w = 0; w < opt.filter_words; ++w) {
    std::vector<std::uint64_t> in(locked.num_inputs()), ref(original.num_inputs());
    for (SignalId i = 0; i < locked.num_inputs(); ++i) in[i] = rng.next();
    for (std::size_t i = 0; i < io.data.size(); ++i) ref[io.ref_in[i]] = in[io.data[i]];
    const auto words = simulate_words(original, ref);
    std::vector<std::uint64_t> out;
    for (std::size_t j = 0; j < locked.num_outputs(); ++j) out.push_back(words[original.output_ids()[io.ref_out[j]]]);
    stim.push_back(std::move(in));
    expected.push_back(std::move(out));
  }

  RemovalReport report;
  report.candidates = scan.size();
  SatBudget budget;
  budget.deadline = deadline;
  for (SignalId s : scan) {
    if (deadline && Clock::now() >= *deadline) {
      report.partial = true;
      break;
    }
    bool stop = false;
    for (bool value : {false, true}) {
      const std::pair<SignalId, std::uint64_t> forced[] = {{s, value ? ~0ull : 0}};
      bool differs = false;
      for (std::size_t w = 0; w < stim.size() && !differs; ++w) {
        const auto words = simulate_words(locked, stim[w], forced);
        for (std::size_t j = 0; j < locked.num_outputs() && !differs; ++j) {
          differs = words[locked.output_ids()[j]] != expected[w][j];
        }
      }
      if (differs) continue;
      CircuitBuilder b(locked);
      b.make_constant(locked.name(s), value);
      ++report.sat_checks;
      const auto r = check_equivalence(original, b.build(), KeyBinding{key_names, std::nullopt}, budget);
      if (r.status == SatStatus::Unknown) {
        report.partial = true;
        stop = true;
        break;
      }
      if (r.equivalent()) report.critical.push_back({locked.name(s), value});
    }
    if (stop) break;
    ++report.scanned;
  }
  return report;
}

}  // namespace locklab
