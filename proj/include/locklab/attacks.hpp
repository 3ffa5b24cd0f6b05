#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "locklab/bitvector.hpp"
#include "locklab/netlist.hpp"
#include "locklab/rng.hpp"
#include "locklab/sat.hpp"

namespace locklab {

/// Black-box access to a working chip. Only the interface (PI/PO names) is
/// visible; answers come from simulating the held circuit.
class Oracle {
public:
  explicit Oracle(Circuit original);

  const std::vector<std::string>& input_names() const { return circuit_.inputs(); }
  const std::vector<std::string>& output_names() const { return circuit_.outputs(); }

  /// One query; `input` in oracle PI order, result in oracle PO order.
  BitVector query(const BitVector& input);
  /// `count` (<= 64) patterns packed one per bit in each input word; returns one
  /// word per PO.
  std::vector<std::uint64_t> query_words(std::span<const std::uint64_t> input_words, unsigned count);

  std::uint64_t queries() const { return queries_; }

private:
  Circuit circuit_;
  std::uint64_t queries_ = 0;
};

enum class AttackStatus { KeyFound, ExactKeyFound, Timeout, NoSolution };

std::string_view to_string(AttackStatus s);
std::optional<AttackStatus> attack_status_from_string(std::string_view s);

struct DipRecord {
  BitVector input;   ///< locked non-key PI order
  BitVector output;  ///< locked PO order
};

struct AttackResult {
  std::string attack;  ///< "sat" or "brute"
  AttackStatus status = AttackStatus::NoSolution;
  std::optional<BitVector> key;
  std::uint64_t iterations = 0;
  std::uint64_t oracle_queries = 0;
  double elapsed = 0;
  std::vector<DipRecord> dip_trace;
  /// Post-hoc equivalence check of the key against the original, when run.
  std::optional<bool> verified;
  /// Brute force: number of keys agreeing with the oracle on every input.
  std::optional<std::uint64_t> agreeing_keys;

  bool success() const { return status == AttackStatus::KeyFound || status == AttackStatus::ExactKeyFound; }
};

struct AttackLimits {
  std::optional<double> seconds = 600.0;
  std::optional<std::uint64_t> max_iterations;
};

/// Oracle-guided DIP attack. When `original` is given the returned key is checked
/// for equivalence afterwards and `verified` is set.
AttackResult sat_attack(const Circuit& locked, const std::vector<std::string>& key_names, Oracle& oracle,
                        const AttackLimits& limits = {}, const Circuit* original = nullptr);

/// Enumerates every key against every input. Throws SizeGuardError beyond 20 key
/// bits or 16 data inputs.
AttackResult brute_force_attack(const Circuit& locked, const std::vector<std::string>& key_names, Oracle& oracle);

/// `input_hex,output_hex` rows with a header line.
std::string dip_trace_csv(const AttackResult& r);

/// locked(key) against original by equivalence miter.
EquivalenceResult verify_key(const Circuit& locked, const std::vector<std::string>& key_names, const BitVector& key,
                             const Circuit& original, const SatBudget& budget = {});

// ---------------------------------------------------------------------------
// Structural probes

enum class MappingMethod { Syntactic, Functional };

std::string_view to_string(MappingMethod m);

struct KeyMapping {
  std::string key;
  /// Data PIs the key is compared against. Empty when unresolved.
  std::vector<std::string> candidates;
};

struct MappingReport {
  MappingMethod method = MappingMethod::Syntactic;
  std::vector<KeyMapping> keys;  ///< in key order
  std::size_t resolved = 0;
  /// Sum of log2 of candidate-set sizes plus one pattern bit per resolved key.
  double raw_exponent = 0;
  /// raw_exponent capped at the key count.
  double ambiguity_exponent = 0;
};

struct MappingOptions {
  /// Largest support (in PIs, keys included) examined by the exhaustive checks.
  std::size_t max_support = 8;
  /// Forces a method; by default syntactic, falling back to functional when no
  /// comparator root is found.
  std::optional<MappingMethod> method;
};

/// Relates each key input to the data PIs it is compared with. A key maps to PI x
/// when some comparator bit equals x XOR key (or its complement) under some
/// setting of the other keys in its support.
MappingReport mapping_probe(const Circuit& locked, const std::vector<std::string>& key_names,
                            const MappingOptions& opt = {});

struct CriticalSignal {
  std::string signal;
  bool value = false;
};

struct RemovalReport {
  std::vector<CriticalSignal> critical;
  std::size_t scanned = 0;     ///< signals examined (each at both constants)
  std::size_t candidates = 0;  ///< signals in the scan set
  std::size_t sat_checks = 0;
  bool partial = false;        ///< budget ran out before the scan finished
};

struct RemovalOptions {
  std::optional<double> seconds;
  /// Random (data, key) words used to reject candidates before any SAT call.
  unsigned filter_words = 4;
  std::uint64_t seed = 1;
};

/// Signals s and constants c such that forcing s to c yields a circuit equal to
/// `original` for every key. Scans gates that are reachable from a key input and
/// feed a primary output.
RemovalReport removal_probe(const Circuit& locked, const std::vector<std::string>& key_names, const Circuit& original,
                            const RemovalOptions& opt = {});

struct CorruptionStats {
  std::uint64_t differing = 0;
  std::uint64_t total = 0;
  bool exhaustive = false;

  double rate() const { return total ? static_cast<double>(differing) / static_cast<double>(total) : 0.0; }
};

/// Exhaustive over all data inputs (at most 20 of them).
CorruptionStats corruption_exhaustive(const Circuit& locked, const std::vector<std::string>& key_names,
                                      const BitVector& key, const Circuit& original);
/// `count` random data patterns.
CorruptionStats corruption_sampled(const Circuit& locked, const std::vector<std::string>& key_names,
                                   const BitVector& key, const Circuit& original, std::uint64_t count, Rng& rng);

}  // namespace locklab
