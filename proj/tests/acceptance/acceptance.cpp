// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Every count below is checked against an oracle computed here by plain
// simulation or by the stated formula, not by the library routine under test.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "locklab/analysis.hpp"
#include "locklab/attacks.hpp"
#include "locklab/locking.hpp"
#include "locklab/sat.hpp"

namespace fs = std::filesystem;
using namespace locklab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string bench_path(const std::string& name) { return std::string(LOCKLAB_SOURCE_DIR) + "/benchmarks/" + name + ".bench"; }
Circuit bench(const std::string& name) { return read_bench_file(bench_path(name)); }
Circuit toy6() { return read_bench_file(std::string(LOCKLAB_SOURCE_DIR) + "/tests/data/toy6.bench"); }

const std::vector<std::string> kCorpus = {"c432", "c499", "c880", "c1908", "c2670"};

Technique tech(TechniqueKind kind, std::size_t n, std::size_t m = 0, bool classic = false) {
  Technique t;
  t.kind = kind;
  t.n = n;
  t.m = m;
  t.classic = classic;
  return t;
}

LockOptions unblended() {
  LockOptions o;
  o.blend = false;
  return o;
}

// Collects failures inside one criterion; the first few are echoed as detail.
struct Check {
  std::vector<std::string> failures;
  std::size_t total = 0;
  void expect(bool ok, const std::string& what) {
    ++total;
    if (!ok) failures.push_back(what);
  }
  bool ok() const { return failures.empty(); }
};

int g_failed = 0;

void report(int id, const std::string& title, const Check& c, const std::string& summary) {
  std::cout << (c.ok() ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << " (" << summary << ")\n";
  for (std::size_t i = 0; i < c.failures.size() && i < 8; ++i) std::cout << "        - " << c.failures[i] << '\n';
  if (c.failures.size() > 8) std::cout << "        - ... " << c.failures.size() - 8 << " more\n";
  std::cout.flush();
  if (!c.ok()) ++g_failed;
}

void info(const std::string& line) { std::cout << "INFO  " << line << '\n'; }

// Pattern word for input i when patterns 0..2^w-1 are packed into one word.
std::uint64_t enum_word(std::size_t i, std::size_t w) {
  std::uint64_t word = 0;
  for (std::uint64_t p = 0; p < (1ull << w); ++p) {
    if ((p >> i) & 1) word |= 1ull << p;
  }
  return word;
}

// Patterns (of at most 6 data inputs, enumerated exhaustively) on which the locked
// design under `key` differs from `original` at some output.
int corrupted_patterns(const Circuit& original, const LockedDesign& ld, const BitVector& key) {
  const std::size_t w = original.num_inputs();
  std::vector<std::uint64_t> ref_in(w), got_in(ld.circuit.num_inputs());
  for (std::size_t i = 0; i < w; ++i) ref_in[i] = enum_word(i, w);
  for (SignalId i = 0; i < ld.circuit.num_inputs(); ++i) {
    const std::string& name = ld.circuit.name(i);
    auto it = std::find(ld.key_inputs.begin(), ld.key_inputs.end(), name);
    if (it != ld.key_inputs.end()) {
      got_in[i] = key[static_cast<std::size_t>(it - ld.key_inputs.begin())] ? ~0ull : 0;
    } else {
      got_in[i] = ref_in[original.id(name)];
    }
  }
  const auto ref = simulate_words(original, ref_in);
  const auto got = simulate_words(ld.circuit, got_in);
  std::uint64_t diff = 0;
  for (const auto& po : original.outputs()) diff |= ref[original.id(po)] ^ got[ld.circuit.id(po)];
  if (w < 6) diff &= (1ull << (1ull << w)) - 1;
  return std::popcount(diff);
}

BitVector bits_of(std::uint64_t v, std::size_t width) {
  BitVector b(width);
  for (std::size_t i = 0; i < width; ++i) b.set(i, (v >> i) & 1);
  return b;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------

void functional_preservation() {
  Check c;
  const TechniqueKind kinds[] = {TechniqueKind::Rll,    TechniqueKind::AntiSat, TechniqueKind::SarLock,
                                 TechniqueKind::TtLock, TechniqueKind::Cac,     TechniqueKind::Cac2};
  double worst = 0;
  std::size_t checks = 0;
  for (const auto& name : kCorpus) {
    const Circuit original = bench(name);
    for (TechniqueKind kind : kinds) {
      for (std::uint64_t seed : {1, 2, 3}) {
        const std::string where = name + "/" + std::string(to_string(kind)) + "/seed " + std::to_string(seed);
        try {
          Rng rng(seed);
          const LockedDesign ld = lock(original, tech(kind, 8, kind == TechniqueKind::Cac2 ? 4 : 0), rng);
          const auto t0 = Clock::now();
          const auto eq = check_equivalence(original, ld.circuit, KeyBinding{ld.key_inputs, ld.secret_key});
          const double dt = seconds_since(t0);
          worst = std::max(worst, dt);
          ++checks;
          c.expect(eq.status == SatStatus::Unsat, where + ": miter not UNSAT");
          c.expect(dt < 5.0, where + ": check took " + fmt(dt) + " s");
        } catch (const std::exception& e) {
          c.expect(false, where + ": " + e.what());
        }
      }
    }
  }
  report(1, "secret key equivalence, 6 techniques x 5 circuits x 3 seeds", c,
         std::to_string(checks) + " miters UNSAT, slowest " + fmt(worst) + " s");
}

void key_schedule() {
  Check c;
  const Circuit host = bench("c432");
  std::size_t locks = 0;
  auto expect_count = [&](TechniqueKind kind, std::size_t n, std::size_t m, std::size_t want) {
    const std::string where = std::string(to_string(kind)) + " n=" + std::to_string(n) + " m=" + std::to_string(m);
    c.expect(tech(kind, n, m).key_count() == want, where + ": key_count");
    try {
      Rng rng(n * 31 + m);
      const LockedDesign ld = lock(host, tech(kind, n, m), rng, unblended());
      ++locks;
      c.expect(ld.key_inputs.size() == want, where + ": built " + std::to_string(ld.key_inputs.size()));
      c.expect(ld.circuit.num_inputs() == host.num_inputs() + want, where + ": PI count");
    } catch (const std::exception& e) {
      c.expect(false, where + ": " + e.what());
    }
  };
  for (std::size_t n = 2; n <= 12; ++n) {
    expect_count(TechniqueKind::SarLock, n, 0, n);
    expect_count(TechniqueKind::TtLock, n, 0, n);
    expect_count(TechniqueKind::Cac, n, 0, n);
    expect_count(TechniqueKind::AntiSat, n, 0, 2 * n);
    for (std::size_t m = 1; m <= n; ++m) expect_count(TechniqueKind::Cac2, n, m, 2 * (n + m));
  }
  const std::size_t spot = tech(TechniqueKind::Cac2, 32, 16).key_count();
  c.expect(spot == 96, "n=32 m=16 gives " + std::to_string(spot));
  report(2, "key-schedule law n / 2n / n / n / 2(n+m)", c,
         std::to_string(locks) + " locked designs match, n=32 m=16 -> " + std::to_string(spot));
}

void corruption_counts() {
  Check c;
  const Circuit six = toy6();
  struct Case {
    const char* label;
    TechniqueKind kind;
    bool classic;
    int per_wrong_key;
  };
  const Case cases[] = {{"sarlock", TechniqueKind::SarLock, false, 1},
                        {"cac", TechniqueKind::Cac, false, 1},
                        {"antisat", TechniqueKind::AntiSat, false, 1},
                        {"ttlock", TechniqueKind::TtLock, false, 2},
                        {"classic cac", TechniqueKind::Cac, true, 2}};
  std::ostringstream summary;
  for (const auto& cs : cases) {
    std::size_t wrong_keys = 0;
    for (std::size_t n = 3; n <= 6; ++n) {
      for (std::uint64_t seed : {1, 2, 3}) {
        Rng rng(seed);
        const LockedDesign ld = lock(six, tech(cs.kind, n, 0, cs.classic), rng);
        const std::size_t k = ld.key_inputs.size();
        for (std::uint64_t v = 0; v < (1ull << k); ++v) {
          const int d = corrupted_patterns(six, ld, bits_of(v, k));
          if (d == 0) continue;
          ++wrong_keys;
          // Every PPI-space pattern repeats once per assignment of the unprotected inputs.
          const int ppi_space = d >> (6 - n);
          c.expect(ppi_space == cs.per_wrong_key && (d % (1 << (6 - n))) == 0,
                   std::string(cs.label) + " n=" + std::to_string(n) + " key " + std::to_string(v) + ": " +
                       std::to_string(d) + " patterns");
        }
      }
    }
    summary << cs.label << "=" << cs.per_wrong_key << " over " << wrong_keys << " wrong keys; ";
  }
  std::string s = summary.str();
  s.resize(s.size() - 2);
  report(3, "exhaustive per-wrong-key corruption on a 6-input toy", c, s);
}

void node_corruption_gain() {
  Check c;
  const std::size_t n = 6, m = 3;
  std::size_t trials = 0;
  for (const std::string name : {"c432", "c880"}) {
    const Circuit host = bench(name);
    for (std::uint64_t seed : {1, 2, 3}) {
      Rng rng(seed);
      const LockedDesign ld = lock(host, tech(TechniqueKind::Cac2, n, m), rng);
      const auto& meta = ld.meta;
      const SignalId target = ld.circuit.id(meta.target_node_2);
      const SignalId locked = ld.circuit.id(meta.locked_node_2);
      // Key order K1 | K2 | OK1 | OK2: only K2 is wrong.
      for (std::uint64_t k2 = 0; k2 < (1ull << m); ++k2) {
        if (bits_of(k2, m) == meta.pattern_2) continue;
        BitVector key = ld.secret_key;
        for (std::size_t i = 0; i < m; ++i) key.set(n + i, (k2 >> i) & 1);
        Rng fill(seed * 1000 + k2);
        std::vector<std::uint64_t> words(ld.circuit.num_inputs());
        for (auto& w : words) w = fill.next();  // other inputs: 64 random backgrounds, one per lane
        for (std::size_t i = 0; i < key.width(); ++i) words[ld.circuit.id(ld.key_inputs[i])] = key[i] ? ~0ull : 0;
        for (std::uint64_t lane_bg = 0; lane_bg < 2; ++lane_bg) {
          int flips = 0;
          for (std::uint64_t p = 0; p < (1ull << n); ++p) {
            std::vector<std::uint64_t> in = words;
            for (std::size_t i = 0; i < n; ++i) in[ld.circuit.id(meta.protected_pis[i])] = ((p >> i) & 1) ? ~0ull : 0;
            const auto sig = simulate_words(ld.circuit, in);
            if (((sig[target] ^ sig[locked]) >> lane_bg) & 1) ++flips;
          }
          ++trials;
          c.expect(flips == 8, name + " seed " + std::to_string(seed) + " K2=" + std::to_string(k2) + ": " +
                                   std::to_string(flips) + " flips");
        }
      }
    }
  }
  report(4, "CAC2 n=6 m=3 wrong K2 flips the second node on 2^(n-m) PPI1 patterns", c,
         std::to_string(trials) + " (design, wrong K2, background) trials, all 8 flips");
}

void dip_growth() {
  Check c;
  const Circuit host = bench("c432");
  const auto t0 = Clock::now();
  struct Row {
    const char* label;
    TechniqueKind kind;
    std::int64_t offset;  // iterations = 2^n + offset
  };
  const Row rows[] = {{"sarlock", TechniqueKind::SarLock, -1},
                      {"cac", TechniqueKind::Cac, -1},
                      {"antisat", TechniqueKind::AntiSat, 0}};
  std::ostringstream summary;
  for (const auto& row : rows) {
    std::vector<double> xs, ys;
    for (std::size_t n = 3; n <= 8; ++n) {
      Rng rng(n);
      const LockedDesign ld = lock(host, tech(row.kind, n), rng);
      Oracle oracle(host);
      const AttackResult r = sat_attack(ld.circuit, ld.key_inputs, oracle, AttackLimits{}, &host);
      const std::uint64_t want = (1ull << n) + row.offset;
      c.expect(r.success() && r.verified.value_or(false),
               std::string(row.label) + " n=" + std::to_string(n) + ": " + std::string(to_string(r.status)));
      c.expect(r.iterations == want, std::string(row.label) + " n=" + std::to_string(n) + ": " +
                                         std::to_string(r.iterations) + " iterations, want " + std::to_string(want));
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log2(static_cast<double>(std::max<std::uint64_t>(1, r.iterations))));
    }
    const double s = slope(xs, ys);
    c.expect(std::abs(s - 1.0) <= 0.05, std::string(row.label) + ": slope " + fmt(s));
    summary << row.label << " slope " << fmt(s) << "; ";
  }
  const double total = seconds_since(t0);
  c.expect(total < 600.0, "sweep took " + fmt(total) + " s");
  summary << "total " << fmt(total, 1) << " s";
  report(5, "SAT-attack DIP growth n=3..8 (2^n-1, 2^n-1, 2^n)", c, summary.str());
}

void cac2_floor() {
  Check c;
  std::ostringstream summary;
  for (const std::string name : {"c432", "c880"}) {
    const Circuit host = bench(name);
    for (std::uint64_t seed : {1, 2, 3}) {
      Rng rng(seed);
      const LockedDesign ld = lock(host, tech(TechniqueKind::Cac2, 8, 4), rng);
      Oracle oracle(host);
      AttackLimits lim;
      lim.seconds = 600.0;
      const AttackResult r = sat_attack(ld.circuit, ld.key_inputs, oracle, lim, &host);
      const bool ok = r.status == AttackStatus::Timeout || r.iterations >= 255;
      c.expect(ok, name + " seed " + std::to_string(seed) + ": " + std::string(to_string(r.status)) + " after " +
                       std::to_string(r.iterations));
      summary << name << "/" << seed << "=" << (r.status == AttackStatus::Timeout ? "timeout" : std::to_string(r.iterations))
              << " ";
    }
  }
  std::string s = summary.str();
  s.pop_back();
  report(6, "CAC2 n=8 m=4 needs >= 255 DIPs or times out", c, "iterations " + s);
}

void removal_resilience() {
  Check c;
  struct Row {
    const char* label;
    TechniqueKind kind;
    bool classic;
    bool expect_critical;
  };
  const Row rows[] = {{"sarlock", TechniqueKind::SarLock, false, true}, {"antisat", TechniqueKind::AntiSat, false, true},
                      {"cac", TechniqueKind::Cac, false, false},        {"ttlock", TechniqueKind::TtLock, false, false},
                      {"cac2", TechniqueKind::Cac2, false, false}};
  std::ostringstream summary;
  auto run_row = [&](const Row& row, Check& into, std::ostringstream& out) {
    std::size_t min_c = SIZE_MAX, max_c = 0;
    for (const std::string name : {"toy6", "c432"}) {
      const Circuit host = name == "toy6" ? toy6() : bench(name);
      for (std::size_t n = 2; n <= 6; n += 2) {
        if (row.kind == TechniqueKind::Cac2 && name == "toy6") continue;  // needs 2n inputs in one cone
        for (std::uint64_t seed : {1, 2}) {
          Rng rng(seed);
          const LockedDesign ld =
              lock(host, tech(row.kind, n, row.kind == TechniqueKind::Cac2 ? std::max<std::size_t>(1, n / 2) : 0, row.classic),
                   rng);
          const RemovalReport r = removal_probe(ld.circuit, ld.key_inputs, host);
          const std::string where = std::string(row.label) + " " + name + " n=" + std::to_string(n) + " seed " +
                                    std::to_string(seed);
          into.expect(!r.partial, where + ": scan incomplete");
          into.expect(row.expect_critical ? !r.critical.empty() : r.critical.empty(),
                      where + ": " + std::to_string(r.critical.size()) + " critical signals");
          min_c = std::min(min_c, r.critical.size());
          max_c = std::max(max_c, r.critical.size());
        }
      }
    }
    out << row.label << " " << min_c << ".." << max_c << "; ";
  };
  for (const auto& row : rows) run_row(row, c, summary);
  std::string s = summary.str();
  s.resize(s.size() - 2);
  report(7, "removal probe: SFLTs expose a critical signal, CAC/TTLock/CAC2 none (n <= 6)", c,
         "critical-signal range " + s);

  Check classic;
  std::ostringstream cs;
  run_row({"classic cac", TechniqueKind::Cac, true, false}, classic, cs);
  info("classic-CAC restore (no hardwired disjunct): " + cs.str().substr(0, cs.str().size() - 2) +
       (classic.ok() ? ", no critical signal" : ", unexpected critical signal"));
}

void mapping_ambiguity() {
  Check c;
  std::ostringstream summary;
  {
    const Circuit host = bench("c432");
    std::size_t designs = 0;
    for (std::size_t n = 4; n <= 8; n += 2) {
      for (std::uint64_t seed : {1, 2, 3}) {
        Rng rng(seed);
        const LockedDesign ld = lock(host, tech(TechniqueKind::Cac, n), rng, unblended());
        const MappingReport r = mapping_probe(ld.circuit, ld.key_inputs);
        const std::string where = "cac n=" + std::to_string(n) + " seed " + std::to_string(seed);
        ++designs;
        c.expect(r.ambiguity_exponent == static_cast<double>(n), where + ": exponent " + fmt(r.ambiguity_exponent));
        for (std::size_t i = 0; i < n; ++i) {
          c.expect(r.keys[i].candidates == std::vector<std::string>{ld.meta.protected_pis[i]},
                   where + ": key " + std::to_string(i) + " not mapped exactly");
        }
      }
    }
    summary << "cac exact on " << designs << " designs; ";
  }
  double lo = 1e9, hi = 0;
  std::size_t designs = 0;
  for (const std::string name : {"c432", "c880"}) {
    const Circuit host = bench(name);
    for (auto [n, m] : {std::pair<std::size_t, std::size_t>{4, 2}, {6, 3}}) {
      for (std::uint64_t seed : {1, 2, 3}) {
        Rng rng(seed);
        const LockedDesign ld = lock(host, tech(TechniqueKind::Cac2, n, m), rng);
        const MappingReport r = mapping_probe(ld.circuit, ld.key_inputs);
        const std::string where =
            "cac2 " + name + " n=" + std::to_string(n) + " m=" + std::to_string(m) + " seed " + std::to_string(seed);
        ++designs;
        // Restore-side keys are K1 then K2.
        for (std::size_t i = 0; i < n + m; ++i) {
          const auto& cands = r.keys[i].candidates;
          const std::string& truth = i < n ? ld.meta.protected_pis[i] : ld.meta.protected_pis_2[i - n];
          c.expect(cands.size() >= 2, where + ": key " + std::to_string(i) + " has " + std::to_string(cands.size()) +
                                          " candidates");
          c.expect(std::find(cands.begin(), cands.end(), truth) != cands.end(),
                   where + ": key " + std::to_string(i) + " misses its PPI");
        }
        const double e = r.ambiguity_exponent;
        c.expect(e > static_cast<double>(n) && e <= static_cast<double>(2 * n + 2 * m), where + ": exponent " + fmt(e));
        lo = std::min(lo, e);
        hi = std::max(hi, e);
      }
    }
  }
  summary << "cac2 exponents " << fmt(lo, 1) << ".." << fmt(hi, 1) << " over " << designs << " designs";
  report(8, "mapping probe: exact for pre-blend CAC, ambiguous for CAC2", c, summary.str());
}

void parser_fidelity() {
  Check c;
  std::size_t files = 0;
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(std::string(LOCKLAB_SOURCE_DIR) + "/benchmarks")) {
    if (e.path().extension() == ".bench") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    try {
      const Circuit a = read_bench_file(p.string());
      const Circuit b = parse_bench(write_bench(a));
      ++files;
      c.expect(a == b, p.filename().string() + ": round trip differs");
    } catch (const std::exception& e) {
      c.expect(false, p.filename().string() + ": " + e.what());
    }
  }
  const Circuit c2670 = bench("c2670");
  c.expect(c2670.num_inputs() == 157 && c2670.num_outputs() == 64,
           "c2670 has " + std::to_string(c2670.num_inputs()) + "/" + std::to_string(c2670.num_outputs()));
  report(9, "bench round trip on every vendored circuit", c,
         std::to_string(files) + " files identical, c2670 PI/PO " + std::to_string(c2670.num_inputs()) + "/" +
             std::to_string(c2670.num_outputs()));
}

void determinism() {
  Check c;
  ExperimentPlan plan;
  plan.circuits = {bench_path("c432"), std::string(LOCKLAB_SOURCE_DIR) + "/tests/data/toy6.bench"};
  plan.techniques = {TechniqueKind::SarLock, TechniqueKind::Cac, TechniqueKind::TtLock, TechniqueKind::Cac2};
  plan.n_values = {3, 4};
  plan.seeds = {7, 8};
  plan.mapping_probe = true;
  plan.removal_probe = true;
  plan.brute_force = true;
  const fs::path dir = fs::temp_directory_path() / ("locklab_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::string first, second;
  {
    plan.workers = 4;
    write_report(run_sweep(plan), ReportFormat::Json, (dir / "a.json").string());
    plan.workers = 1;
    write_report(run_sweep(plan), ReportFormat::Json, (dir / "b.json").string());
    first = read_text_file((dir / "a.json").string());
    second = read_text_file((dir / "b.json").string());
  }
  fs::remove_all(dir);
  c.expect(!first.empty() && first == second, "reports differ");
  report(10, "same plan and seeds give byte-identical JSON", c,
         std::to_string(first.size()) + " bytes, " + std::to_string(records_from_json(first).size()) + " records");
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<void()>>> steps = {
      {1, functional_preservation}, {2, key_schedule}, {3, corruption_counts}, {4, node_corruption_gain},
      {5, dip_growth},              {6, cac2_floor},   {7, removal_resilience}, {8, mapping_ambiguity},
      {9, parser_fidelity},         {10, determinism}};
  const auto t0 = Clock::now();
  for (const auto& [id, step] : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      Check c;
      c.expect(false, e.what());
      report(id, "aborted", c, "exception");
    }
  }
  std::cout << (g_failed == 0 ? "ALL PASS" : std::to_string(g_failed) + " criteria failed") << " in "
            << fmt(seconds_since(t0), 1) << " s\n";
  return g_failed == 0 ? 0 : 1;
}
