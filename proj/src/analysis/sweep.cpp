#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include "locklab/analysis.hpp"
#include "locklab/error.hpp"

namespace locklab {
namespace {

bool two_locks(TechniqueKind k) { return k == TechniqueKind::DoubleCac || k == TechniqueKind::Cac2; }

std::size_t data_inputs(const LockedDesign& ld) { return ld.circuit.num_inputs() - ld.key_inputs.size(); }

struct Cell {
  std::size_t circuit;
  Technique technique;
  std::uint64_t seed;
};

}  // namespace

void ExperimentPlan::validate() const {
  if (n_values.empty()) throw Error("plan: n range is empty");
  if (seeds.empty()) throw Error("plan: seed list is empty");
  for (std::size_t n : n_values) {
    if (n < 1) throw Error("plan: n must be at least 1");
    for (std::size_t m : m_values) {
      if (m < 1) throw Error("plan: m must be at least 1");
    }
  }
  if (limits.seconds && *limits.seconds < 0) throw Error("plan: negative timeout");
}

double gate_overhead(std::size_t before, std::size_t after) {
  if (before == 0) return 0.0;
  return (static_cast<double>(after) - static_cast<double>(before)) / static_cast<double>(before);
}

double gate_overhead(const RunRecord& r) { return gate_overhead(r.gates_before, r.gates_after); }

AttackRecord summarize(const AttackResult& r) {
  AttackRecord a;
  a.attack = r.attack;
  a.status = r.status;
  a.iterations = r.iterations;
  a.oracle_queries = r.oracle_queries;
  a.elapsed = r.elapsed;
  a.verified = r.verified;
  a.agreeing_keys = r.agreeing_keys;
  if (r.key) a.key = r.key->to_string();
  return a;
}

RunRecord run_cell(const Circuit& original, const std::string& circuit_id, const Technique& t, std::uint64_t seed,
                   const ExperimentPlan& plan) {
  RunRecord rec;
  rec.circuit = circuit_id;
  rec.technique = t.kind;
  rec.n = t.n;
  rec.m = t.m;
  rec.k = t.key_count();
  rec.seed = seed;
  rec.classic = t.classic || plan.lock.classic_cac;
  rec.gates_before = original.num_gates();
  std::vector<std::string> notes;
  try {
    Rng rng(seed);
    const auto start = std::chrono::steady_clock::now();
    const LockedDesign ld = lock(original, t, rng, plan.lock);
    rec.lock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.gates_after = ld.circuit.num_gates();
    rec.k = ld.key_inputs.size();
    if (t.kind == TechniqueKind::Cac2) {
      rec.obf_bits_nominal = t.n + 2 * t.m;
      rec.obf_bits_structural = t.n + t.m;
    }
    const auto eq = verify_key(ld.circuit, ld.key_inputs, ld.secret_key, original);
    rec.equivalence = eq.status == SatStatus::Unsat ? "UNSAT" : eq.status == SatStatus::Sat ? "SAT" : "UNKNOWN";
    rec.valid = eq.equivalent();

    if (plan.sat_attack) {
      Oracle oracle(original);
      rec.attacks.push_back(summarize(sat_attack(ld.circuit, ld.key_inputs, oracle, plan.limits, &original)));
    }
    if (plan.brute_force) {
      try {
        Oracle oracle(original);
        rec.attacks.push_back(summarize(brute_force_attack(ld.circuit, ld.key_inputs, oracle)));
      } catch (const SizeGuardError& e) {
        notes.push_back(std::string("brute force skipped: ") + e.what());
      }
    }
    if (plan.corruption_samples > 0 || data_inputs(ld) <= 16) {
      BitVector wrong(ld.secret_key.width());
      for (std::size_t i = 0; i < wrong.width(); ++i) wrong.set(i, rng.coin());
      if (wrong == ld.secret_key) wrong.flip(0);
      const CorruptionStats s = data_inputs(ld) <= 16
                                    ? corruption_exhaustive(ld.circuit, ld.key_inputs, wrong, original)
                                    : corruption_sampled(ld.circuit, ld.key_inputs, wrong, original,
                                                         plan.corruption_samples, rng);
      rec.corruption = CorruptionRecord{s.differing, s.total, s.exhaustive};
    }
    if (plan.mapping_probe) {
      const MappingReport mr = mapping_probe(ld.circuit, ld.key_inputs);
      rec.mapping_exponent = mr.ambiguity_exponent;
      rec.mapping_resolved = mr.resolved;
    }
    if (plan.removal_probe) {
      RemovalOptions ro;
      ro.seconds = plan.removal_seconds;
      ro.seed = seed;
      const RemovalReport rr = removal_probe(ld.circuit, ld.key_inputs, original, ro);
      rec.critical_signals = rr.critical.size();
      rec.removal_partial = rr.partial;
    }
  } catch (const std::exception& e) {
    notes.push_back(e.what());
  }
  for (const auto& note : notes) rec.error += (rec.error.empty() ? "" : "; ") + note;
  return rec;
}

std::vector<RunRecord> run_sweep(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<Circuit> circuits;
  std::vector<std::string> ids;
  for (const auto& path : plan.circuits) {
    circuits.push_back(read_bench_file(path));
    ids.push_back(std::filesystem::path(path).stem().string());
  }

  std::vector<Cell> cells;
  for (std::size_t ci = 0; ci < circuits.size(); ++ci) {
    for (TechniqueKind kind : plan.techniques) {
      for (std::size_t n : plan.n_values) {
        std::vector<std::size_t> ms{0};
        if (two_locks(kind)) ms = plan.m_values.empty() ? std::vector<std::size_t>{std::max<std::size_t>(1, n / 2)}
                                                        : plan.m_values;
        for (std::size_t m : ms) {
          for (std::uint64_t seed : plan.seeds) {
            Technique t;
            t.kind = kind;
            t.n = n;
            t.m = m;
            t.classic = plan.lock.classic_cac && (kind == TechniqueKind::Cac || two_locks(kind));
            cells.push_back({ci, t, seed});
          }
        }
      }
    }
  }

  std::vector<RunRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
      const Cell& c = cells[i];
      if (c.technique.m > c.technique.n) {
        RunRecord rec;
        rec.circuit = ids[c.circuit];
        rec.technique = c.technique.kind;
        rec.n = c.technique.n;
        rec.m = c.technique.m;
        rec.seed = c.seed;
        rec.gates_before = circuits[c.circuit].num_gates();
        rec.error = "m exceeds n";
        records[i] = std::move(rec);
        continue;
      }
      records[i] = run_cell(circuits[c.circuit], ids[c.circuit], c.technique, c.seed, plan);
    }
  };
  unsigned workers = plan.workers ? plan.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, cells.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return records;
}

}  // namespace locklab
