#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "locklab/attacks.hpp"
#include "locklab/locking.hpp"

namespace locklab {

struct ExperimentPlan {
  std::vector<std::string> circuits;  ///< bench paths
  std::vector<TechniqueKind> techniques;
  std::vector<std::size_t> n_values;
  /// Second-lock sizes for dcac/cac2; empty means m = n/2 (at least 1).
  std::vector<std::size_t> m_values;
  std::vector<std::uint64_t> seeds;

  bool sat_attack = true;
  bool brute_force = false;
  bool mapping_probe = false;
  bool removal_probe = false;
  AttackLimits limits;
  std::optional<double> removal_seconds;
  /// Wrong-key corruption: exhaustive up to 20 data inputs, otherwise this many samples.
  std::uint64_t corruption_samples = 4096;

  LockOptions lock;
  std::string output_dir;
  unsigned workers = 0;  ///< 0: hardware concurrency

  /// Throws Error on an empty n range or seed list, n = 0, or m outside 1..n.
  void validate() const;
};

struct AttackRecord {
  std::string attack;
  AttackStatus status = AttackStatus::NoSolution;
  std::uint64_t iterations = 0;
  std::uint64_t oracle_queries = 0;
  double elapsed = 0;
  std::optional<bool> verified;
  std::optional<std::uint64_t> agreeing_keys;
  std::string key;  ///< bit string, empty when none

  friend bool operator==(const AttackRecord&, const AttackRecord&) = default;
};

AttackRecord summarize(const AttackResult& r);

struct CorruptionRecord {
  std::uint64_t differing = 0;
  std::uint64_t total = 0;
  bool exhaustive = false;

  friend bool operator==(const CorruptionRecord&, const CorruptionRecord&) = default;
};

struct RunRecord {
  std::string circuit;  ///< file stem
  TechniqueKind technique = TechniqueKind::Cac;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  bool classic = false;
  double lock_seconds = 0;
  std::size_t gates_before = 0;
  std::size_t gates_after = 0;
  std::string equivalence;  ///< "UNSAT" (pass), "SAT" or "UNKNOWN"; empty if locking failed
  bool valid = false;
  /// Obfuscation key bits: as counted by the technique's description (n + 2m) and
  /// as built (OK1 and OK2, n + m). Zero for techniques without obfuscation.
  std::size_t obf_bits_nominal = 0;
  std::size_t obf_bits_structural = 0;
  std::vector<AttackRecord> attacks;
  std::optional<CorruptionRecord> corruption;
  std::optional<double> mapping_exponent;
  std::optional<std::size_t> mapping_resolved;
  std::optional<std::size_t> critical_signals;
  std::optional<bool> removal_partial;
  std::string error;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// (gates after - gates before) / gates before.
double gate_overhead(const RunRecord& r);
double gate_overhead(std::size_t before, std::size_t after);

/// Every (circuit, technique, n, m, seed) cell, run on a worker pool and returned
/// in plan order. Per-cell failures land in RunRecord::error.
std::vector<RunRecord> run_sweep(const ExperimentPlan& plan);

/// One cell, as run_sweep does it.
RunRecord run_cell(const Circuit& original, const std::string& circuit_id, const Technique& t, std::uint64_t seed,
                   const ExperimentPlan& plan);

ExperimentPlan plan_from_json(std::string_view text, const std::string& base_dir = {});
std::string plan_to_json(const ExperimentPlan& plan);

struct ReportOptions {
  /// Wall-clock fields vary run to run; without them the JSON is byte-stable.
  bool timings = false;
};

std::string records_to_json(const std::vector<RunRecord>& records, const ReportOptions& opt = {});
std::vector<RunRecord> records_from_json(std::string_view text);
/// One row per (record, attack); records without attacks get one row. The elapsed
/// column is empty unless timings are on.
std::string records_to_csv(const std::vector<RunRecord>& records, const ReportOptions& opt = {});

enum class ReportFormat { Json, Csv };
void write_report(const std::vector<RunRecord>& records, ReportFormat format, const std::string& path,
                  const ReportOptions& opt = {});

std::string attack_result_json(const AttackResult& r, bool with_trace = true);
std::string mapping_report_json(const MappingReport& r);
std::string removal_report_json(const RemovalReport& r);

/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace locklab
