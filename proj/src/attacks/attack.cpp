#include <array>
#include <chrono>
#include <sstream>

#include "interface.hpp"
#include "locklab/attacks.hpp"
#include "locklab/cnf.hpp"
#include "locklab/error.hpp"

namespace locklab {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr std::array<std::pair<AttackStatus, std::string_view>, 4> kStatusNames = {{
    {AttackStatus::KeyFound, "KeyFound"},
    {AttackStatus::ExactKeyFound, "ExactKeyFound"},
    {AttackStatus::Timeout, "Timeout"},
    {AttackStatus::NoSolution, "NoSolution"},
}};

}  // namespace

std::string_view to_string(AttackStatus s) {
  for (const auto& [k, name] : kStatusNames) {
    if (k == s) return name;
  }
  return "?";
}

std::optional<AttackStatus> attack_status_from_string(std::string_view s) {
  for (const auto& [k, name] : kStatusNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

Oracle::Oracle(Circuit original) : circuit_(std::move(original)) {}

BitVector Oracle::query(const BitVector& input) {
  ++queries_;
  return simulate(circuit_, input);
}

std::vector<std::uint64_t> Oracle::query_words(std::span<const std::uint64_t> input_words, unsigned count) {
  if (count > 64) throw Error("at most 64 patterns per word query");
  if (input_words.size() != circuit_.num_inputs()) {
    throw InterfaceError("oracle expects " + std::to_string(circuit_.num_inputs()) + " input words");
  }
  queries_ += count;
  const auto words = simulate_words(circuit_, input_words);
  std::vector<std::uint64_t> out;
  for (SignalId po : circuit_.output_ids()) out.push_back(words[po]);
  return out;
}

AttackResult sat_attack(const Circuit& locked, const std::vector<std::string>& key_names, Oracle& oracle,
                        const AttackLimits& limits, const Circuit* original) {
  const auto start = Clock::now();
  const auto io = detail::match_interface(locked, key_names, oracle.input_names(), oracle.output_names());
  AttackMiter miter = build_attack_miter(locked, key_names);
  SatSolver solver(miter.formula);
  SatBudget budget;
  if (limits.seconds) {
    budget.deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*limits.seconds));
  }
  const std::uint64_t queries_before = oracle.queries();
  const std::vector<Lit> differ{miter.diff_enable};
  const std::vector<Lit> agree{~miter.diff_enable};

  AttackResult r;
  r.attack = "sat";
  r.status = AttackStatus::Timeout;
  for (;;) {
    if (limits.max_iterations && r.iterations >= *limits.max_iterations) break;
    const SatStatus st = solver.solve(differ, budget);
    if (st == SatStatus::Unknown) break;
    if (st == SatStatus::Unsat) {
      // Every surviving key is correct on the oracle; take any of them.
      const SatStatus last = solver.solve(agree, budget);
      if (last == SatStatus::Sat) {
        BitVector key(miter.key1.size());
        for (std::size_t i = 0; i < key.width(); ++i) key.set(i, solver.value(miter.key1[i]));
        r.key = key;
        r.status = AttackStatus::KeyFound;
      } else if (last == SatStatus::Unsat) {
        r.status = AttackStatus::NoSolution;
      }
      break;
    }
    BitVector dip(miter.inputs.size());
    for (std::size_t i = 0; i < dip.width(); ++i) dip.set(i, solver.value(miter.inputs[i]));
    BitVector query(io.data.size());
    for (std::size_t i = 0; i < dip.width(); ++i) query.set(io.ref_in[i], dip[i]);
    const BitVector answer = oracle.query(query);
    BitVector out(locked.num_outputs());
    for (std::size_t j = 0; j < out.width(); ++j) out.set(j, answer[io.ref_out[j]]);
    add_dip_constraint(miter, dip, out);
    r.dip_trace.push_back({dip, out});
    ++r.iterations;
  }
  r.oracle_queries = oracle.queries() - queries_before;
  r.elapsed = seconds_since(start);
  if (r.key && original) r.verified = verify_key(locked, key_names, *r.key, *original).equivalent();
  return r;
}

AttackResult brute_force_attack(const Circuit& locked, const std::vector<std::string>& key_names, Oracle& oracle) {
  const auto start = Clock::now();
  const auto io = detail::match_interface(locked, key_names, oracle.input_names(), oracle.output_names());
  if (io.keys.size() > 20) throw SizeGuardError("brute force limited to 20 key bits, got " + std::to_string(io.keys.size()));
  if (io.data.size() > 16) throw SizeGuardError("brute force limited to 16 data inputs, got " + std::to_string(io.data.size()));
  const std::uint64_t queries_before = oracle.queries();

  const std::uint64_t patterns = 1ull << io.data.size();
  const std::uint64_t blocks = (patterns + 63) / 64;
  const std::uint64_t last_mask = patterns >= 64 ? ~0ull : (1ull << patterns) - 1;

  std::vector<std::vector<std::uint64_t>> expected(blocks);
  std::vector<std::uint64_t> in(locked.num_inputs(), 0), ref(io.data.size(), 0);
  for (std::uint64_t b = 0; b < blocks; ++b) {
    for (std::size_t i = 0; i < io.data.size(); ++i) ref[io.ref_in[i]] = detail::enumeration_word(i, b);
    const auto answer = oracle.query_words(ref, static_cast<unsigned>(std::min<std::uint64_t>(64, patterns)));
    for (std::size_t j = 0; j < locked.num_outputs(); ++j) expected[b].push_back(answer[io.ref_out[j]]);
  }

  AttackResult r;
  r.attack = "brute";
  std::uint64_t agreeing = 0;
  for (std::uint64_t k = 0; k < (1ull << io.keys.size()); ++k) {
    for (std::size_t i = 0; i < io.keys.size(); ++i) in[io.keys[i]] = ((k >> i) & 1) ? ~0ull : 0;
    bool ok = true;
    for (std::uint64_t b = 0; b < blocks && ok; ++b) {
      for (std::size_t i = 0; i < io.data.size(); ++i) in[io.data[i]] = detail::enumeration_word(i, b);
      const auto words = simulate_words(locked, in);
      const std::uint64_t mask = b + 1 == blocks ? last_mask : ~0ull;
      for (std::size_t j = 0; j < locked.num_outputs() && ok; ++j) {
        ok = ((words[locked.output_ids()[j]] ^ expected[b][j]) & mask) == 0;
      }
    }
    if (!ok) continue;
    if (agreeing++ == 0) r.key = BitVector::from_uint(k, io.keys.size());
  }
  r.agreeing_keys = agreeing;
  r.status = agreeing ? AttackStatus::ExactKeyFound : AttackStatus::NoSolution;
  r.oracle_queries = oracle.queries() - queries_before;
  r.elapsed = seconds_since(start);
  return r;
}

std::string dip_trace_csv(const AttackResult& r) {
  std::ostringstream out;
  out << "iteration,input_hex,output_hex\n";
  for (std::size_t i = 0; i < r.dip_trace.size(); ++i) {
    out << i + 1 << ',' << r.dip_trace[i].input.to_hex() << ',' << r.dip_trace[i].output.to_hex() << '\n';
  }
  return out.str();
}

EquivalenceResult verify_key(const Circuit& locked, const std::vector<std::string>& key_names, const BitVector& key,
                             const Circuit& original, const SatBudget& budget) {
  if (key.width() != key_names.size()) {
    throw InterfaceError("key has " + std::to_string(key.width()) + " bits for " + std::to_string(key_names.size()) +
                         " key inputs");
  }
  return check_equivalence(original, locked, KeyBinding{key_names, key}, budget);
}

}  // namespace locklab
