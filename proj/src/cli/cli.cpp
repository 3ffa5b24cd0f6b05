#include "locklab/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "locklab/analysis.hpp"
#include "locklab/attacks.hpp"
#include "locklab/error.hpp"
#include "locklab/locking.hpp"

namespace locklab::cli {
namespace {

using nlohmann::ordered_json;

std::string seed_text(std::uint64_t seed) { return std::to_string(seed); }

std::string with_extension(const std::string& path, const std::string& ext) {
  return std::filesystem::path(path).replace_extension(ext).string();
}

Circuit read_circuit(const std::string& path) { return read_bench_file(path); }

// Flags as echoed into output headers.
std::string flag_line(const CLI::App& sub) {
  std::ostringstream s;
  s << sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help" || opt->count() == 0) continue;
    s << ' ' << opt->get_name();
    for (const auto& r : opt->results()) {
      if (r != "true" || opt->get_expected_min() > 0) s << ' ' << r;
    }
  }
  return s.str();
}

ordered_json parse_json(const std::string& text) { return ordered_json::parse(text); }

struct LockArgs {
  std::string in, out = "out.bench", key, technique;
  std::size_t n = 0, m = 0, rll_bits = 0;
  std::optional<std::uint64_t> seed;
  bool classic = false, no_blend = false;
  unsigned blend_rounds = 2;
};

int cmd_lock(const LockArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const auto kind = technique_from_string(a.technique);
  if (!kind) {
    err << "error: unknown technique '" << a.technique << "'\n";
    return kUsage;
  }
  const std::uint64_t seed = effective_seed(a.seed);
  const Circuit original = read_circuit(a.in);
  Technique t;
  t.kind = *kind;
  t.n = a.n;
  t.m = a.m;
  t.classic = a.classic;
  t.rll_bits = a.rll_bits;
  t.validate();
  LockOptions opt;
  opt.blend = !a.no_blend;
  opt.blend_rounds = a.blend_rounds;
  opt.classic_cac = a.classic;
  Rng rng(seed);
  LockedDesign ld;
  try {
    ld = lock(original, t, rng, opt);
  } catch (const InfeasibleError& e) {
    err << "error: infeasible: " << e.what() << "; max feasible n = " << max_feasible_n(original, *kind) << '\n';
    return kInfeasible;
  }
  const std::string key_path = a.key.empty() ? with_extension(a.out, ".key") : a.key;
  const std::vector<std::string> header = {
      "locklab: technique=" + a.technique + ", n=" + std::to_string(a.n) + ", m=" + std::to_string(a.m) +
          ", seed=" + seed_text(seed),
      "locklab: " + flag_line(sub)};
  write_file_atomic(a.out, write_bench(ld.circuit, header));
  write_file_atomic(key_path, write_keyfile(ld, {{"seed", seed_text(seed)}}));
  out << "# locklab: seed=" << seed << '\n';
  out << "k=" << ld.key_inputs.size() << '\n';
  if (!ld.meta.target_po.empty()) out << "target_po=" << ld.meta.target_po << '\n';
  if (!ld.meta.target_node_2.empty()) out << "target_node=" << ld.meta.target_node_2 << '\n';
  out << "gates_before=" << original.num_gates() << '\n';
  out << "gates_after=" << ld.circuit.num_gates() << '\n';
  out << "gate_overhead=" << gate_overhead(original.num_gates(), ld.circuit.num_gates()) << '\n';
  if (ld.meta.relock_attempts > 1) out << "relock_attempts=" << ld.meta.relock_attempts << '\n';
  out << "locked=" << a.out << '\n' << "key=" << key_path << '\n';
  return kOk;
}

struct AttackArgs {
  std::string locked, oracle, attack = "sat", out, trace;
  std::optional<double> timeout;
  std::optional<std::uint64_t> max_iterations, seed;
};

int cmd_attack(const AttackArgs& a, const CLI::App& sub, std::ostream& out, std::ostream&) {
  const std::uint64_t seed = effective_seed(a.seed);
  const Circuit locked = read_circuit(a.locked);
  const Circuit original = read_circuit(a.oracle);
  const auto keys = detect_key_inputs(locked);
  Oracle oracle(original);
  AttackResult r;
  if (a.attack == "brute") {
    r = brute_force_attack(locked, keys, oracle);
  } else {
    AttackLimits lim;
    lim.seconds = a.timeout.value_or(600.0);
    lim.max_iterations = a.max_iterations;
    r = sat_attack(locked, keys, oracle, lim, &original);
  }
  ordered_json j = parse_json(attack_result_json(r));
  j["seed"] = seed;
  j["flags"] = flag_line(sub);
  if (!a.out.empty()) write_file_atomic(a.out, j.dump(2) + "\n");
  if (!a.trace.empty()) write_file_atomic(a.trace, dip_trace_csv(r));
  out << "# locklab: seed=" << seed << '\n';
  out << "status=" << to_string(r.status) << '\n' << "iterations=" << r.iterations << '\n';
  if (r.key) out << "key=" << r.key->to_string() << '\n';
  if (r.agreeing_keys) out << "agreeing_keys=" << *r.agreeing_keys << '\n';
  if (r.verified) out << "verified=" << (*r.verified ? "true" : "false") << '\n';
  out << "elapsed=" << r.elapsed << '\n';
  switch (r.status) {
    case AttackStatus::KeyFound:
    case AttackStatus::ExactKeyFound: return kOk;
    case AttackStatus::Timeout: return kTimeout;
    case AttackStatus::NoSolution: return kNoSolution;
  }
  return kNoSolution;
}

struct VerifyArgs {
  std::string locked, key, original;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const Circuit locked = read_circuit(a.locked);
  const Circuit original = read_circuit(a.original);
  const KeyFile kf = read_keyfile(read_text_file(a.key));
  check_keyfile(kf, detect_key_inputs(locked));
  const auto r = verify_key(locked, kf.names, kf.bits, original);
  if (r.equivalent()) {
    out << "equivalent\n";
    return kOk;
  }
  if (r.status == SatStatus::Unknown) {
    err << "error: equivalence check did not finish\n";
    return kTimeout;
  }
  out << "not equivalent\ncounterexample:";
  for (const auto& pi : original.inputs()) out << ' ' << pi << '=' << (r.counterexample->at(pi) ? 1 : 0);
  out << '\n';
  return kMismatch;
}

struct AnalyzeArgs {
  std::string locked, probe, original, key, out;
  std::optional<std::uint64_t> seed, samples;
  std::optional<double> timeout;
  bool functional = false;
};

int cmd_analyze(const AnalyzeArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = effective_seed(a.seed);
  const Circuit locked = read_circuit(a.locked);
  const auto keys = detect_key_inputs(locked);
  ordered_json j;
  if (a.probe == "mapping") {
    MappingOptions opt;
    if (a.functional) opt.method = MappingMethod::Functional;
    const MappingReport r = mapping_probe(locked, keys, opt);
    j = parse_json(mapping_report_json(r));
    out << "method=" << to_string(r.method) << '\n' << "resolved=" << r.resolved << '\n';
    out << "ambiguity_exponent=" << r.ambiguity_exponent << '\n';
  } else {
    if (a.original.empty()) {
      err << "error: --probe " << a.probe << " needs --original\n";
      return kUsage;
    }
    const Circuit original = read_circuit(a.original);
    if (a.probe == "removal") {
      RemovalOptions opt;
      opt.seconds = a.timeout;
      opt.seed = seed;
      const RemovalReport r = removal_probe(locked, keys, original, opt);
      j = parse_json(removal_report_json(r));
      out << "critical_signals=" << r.critical.size() << (r.partial ? " (partial)" : "") << '\n';
      for (const auto& c : r.critical) out << c.signal << '=' << (c.value ? 1 : 0) << '\n';
    } else {
      Rng rng(seed);
      BitVector key(keys.size());
      if (!a.key.empty()) {
        const KeyFile kf = read_keyfile(read_text_file(a.key));
        check_keyfile(kf, keys);
        key = kf.bits;
      } else {
        for (std::size_t i = 0; i < key.width(); ++i) key.set(i, rng.coin());
      }
      const std::size_t data = locked.num_inputs() - keys.size();
      const CorruptionStats s = (data <= 20 && !a.samples)
                                    ? corruption_exhaustive(locked, keys, key, original)
                                    : corruption_sampled(locked, keys, key, original, a.samples.value_or(4096), rng);
      j["key"] = key.to_string();
      j["differing"] = s.differing;
      j["total"] = s.total;
      j["exhaustive"] = s.exhaustive;
      j["rate"] = s.rate();
      out << "key=" << key.to_string() << '\n' << "rate=" << s.rate() << " (" << s.differing << '/' << s.total << ")\n";
    }
  }
  j["probe"] = a.probe;
  j["seed"] = seed;
  j["flags"] = flag_line(sub);
  if (!a.out.empty()) write_file_atomic(a.out, j.dump(2) + "\n");
  out << "# locklab: seed=" << seed << '\n';
  return kOk;
}

struct SweepArgs {
  std::string plan, out_dir;
  std::optional<unsigned> workers;
  bool timings = false;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const std::string base = std::filesystem::path(a.plan).parent_path().string();
  ExperimentPlan plan = plan_from_json(read_text_file(a.plan), base);
  if (a.workers) plan.workers = *a.workers;
  std::string dir = a.out_dir.empty() ? plan.output_dir : a.out_dir;
  if (dir.empty()) dir = ".";
  else if (a.out_dir.empty() && std::filesystem::path(dir).is_relative() && !base.empty()) dir = (std::filesystem::path(base) / dir).string();
  const auto records = run_sweep(plan);
  ReportOptions opt;
  opt.timings = a.timings;
  const std::string json_path = (std::filesystem::path(dir) / "records.json").string();
  const std::string csv_path = (std::filesystem::path(dir) / "records.csv").string();
  write_report(records, ReportFormat::Json, json_path, opt);
  write_report(records, ReportFormat::Csv, csv_path, opt);
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.error.empty() && r.valid ? 0 : 1;
  out << "records=" << records.size() << '\n' << "failed=" << failed << '\n';
  out << "json=" << json_path << '\n' << "csv=" << csv_path << '\n';
  return kOk;
}

int cmd_info(const std::string& path, std::ostream& out) {
  const Circuit c = read_circuit(path);
  out << "inputs=" << c.num_inputs() << '\n' << "outputs=" << c.num_outputs() << '\n' << "gates=" << c.num_gates() << '\n';
  for (auto kind : {TechniqueKind::Rll, TechniqueKind::SarLock, TechniqueKind::DoubleCac, TechniqueKind::Cac2}) {
    out << "max_n." << to_string(kind) << '=' << max_feasible_n(c, kind) << '\n';
  }
  return kOk;
}

}  // namespace

std::uint64_t effective_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("LOCKLAB_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used, 0);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return v;
    } catch (const std::exception&) {
      throw Error(std::string("LOCKLAB_SEED is not an integer: ") + env);
    }
  }
  return kDefaultSeed;
}

std::vector<std::string> detect_key_inputs(const Circuit& c) {
  static const std::regex key_name("keyinput[0-9]+");
  std::vector<std::string> keys;
  for (const auto& pi : c.inputs()) {
    if (std::regex_match(pi, key_name)) keys.push_back(pi);
  }
  return keys;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Logic-locking workbench"};
  app.name("locklab");
  app.require_subcommand(1);

  LockArgs lock_args;
  auto* lock_cmd = app.add_subcommand("lock", "Lock a bench netlist");
  lock_cmd->add_option("input", lock_args.in, "Original bench file")->required();
  lock_cmd->add_option("--technique,-t", lock_args.technique, "rll|antisat|sarlock|ttlock|cac|dcac|cac2")->required();
  lock_cmd->add_option("--n", lock_args.n, "Protected bits (RLL: key bits)")->required();
  lock_cmd->add_option("--m", lock_args.m, "Second-lock bits (dcac, cac2)");
  lock_cmd->add_option("--rll-bits", lock_args.rll_bits, "Extra RLL key gates layered on top");
  lock_cmd->add_flag("--classic-cac", lock_args.classic, "Restore without the hardwired disjunct");
  lock_cmd->add_option("--seed", lock_args.seed, "Random seed (default: LOCKLAB_SEED or 0xC0FFEE)");
  lock_cmd->add_option("--out,-o", lock_args.out, "Locked bench output")->capture_default_str();
  lock_cmd->add_option("--key,-k", lock_args.key, "Key file output (default: <out>.key)");
  lock_cmd->add_option("--blend-rounds", lock_args.blend_rounds, "Structural blend rounds")->capture_default_str();
  lock_cmd->add_flag("--no-blend", lock_args.no_blend, "Skip structural blending");

  AttackArgs attack_args;
  auto* attack_cmd = app.add_subcommand("attack", "Run an oracle-guided attack");
  attack_cmd->add_option("locked", attack_args.locked, "Locked bench file")->required();
  attack_cmd->add_option("--oracle", attack_args.oracle, "Original bench file used as the oracle")->required();
  attack_cmd->add_option("--attack", attack_args.attack, "sat|brute")
      ->check(CLI::IsMember({"sat", "brute"}))
      ->capture_default_str();
  attack_cmd->add_option("--timeout", attack_args.timeout, "Wall-clock limit in seconds (default 600)");
  attack_cmd->add_option("--max-iterations", attack_args.max_iterations, "DIP limit");
  attack_cmd->add_option("--seed", attack_args.seed, "Random seed");
  attack_cmd->add_option("--out,-o", attack_args.out, "Result JSON");
  attack_cmd->add_option("--trace", attack_args.trace, "DIP trace CSV");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Check a key against the original by equivalence");
  verify_cmd->add_option("locked", verify_args.locked, "Locked bench file")->required();
  verify_cmd->add_option("key", verify_args.key, "Key file")->required();
  verify_cmd->add_option("original", verify_args.original, "Original bench file")->required();

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Run a structural or corruption probe");
  analyze_cmd->add_option("locked", analyze_args.locked, "Locked bench file")->required();
  analyze_cmd->add_option("--probe", analyze_args.probe, "mapping|removal|corruption")
      ->required()
      ->check(CLI::IsMember({"mapping", "removal", "corruption"}));
  analyze_cmd->add_option("--original", analyze_args.original, "Original bench file (removal, corruption)");
  analyze_cmd->add_option("--key", analyze_args.key, "Key file for the corruption probe (default: random key)");
  analyze_cmd->add_option("--samples", analyze_args.samples, "Sampled corruption patterns");
  analyze_cmd->add_option("--timeout", analyze_args.timeout, "Removal probe budget in seconds");
  analyze_cmd->add_flag("--functional", analyze_args.functional, "Mapping probe: functional comparator detection only");
  analyze_cmd->add_option("--seed", analyze_args.seed, "Random seed");
  analyze_cmd->add_option("--out,-o", analyze_args.out, "Report JSON");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment plan");
  sweep_cmd->add_option("plan", sweep_args.plan, "Plan JSON")->required();
  sweep_cmd->add_option("--out-dir", sweep_args.out_dir, "Directory for records.json and records.csv");
  sweep_cmd->add_option("--workers", sweep_args.workers, "Worker threads");
  sweep_cmd->add_flag("--timings", sweep_args.timings, "Keep wall-clock fields in the JSON");

  std::string info_path;
  auto* info_cmd = app.add_subcommand("info", "Circuit statistics and feasible lock sizes");
  info_cmd->add_option("input", info_path, "Bench file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*lock_cmd) return cmd_lock(lock_args, *lock_cmd, out, err);
    if (*attack_cmd) return cmd_attack(attack_args, *attack_cmd, out, err);
    if (*verify_cmd) return cmd_verify(verify_args, out, err);
    if (*analyze_cmd) return cmd_analyze(analyze_args, *analyze_cmd, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep_args, out);
    if (*info_cmd) return cmd_info(info_path, out);
  } catch (const InfeasibleError& e) {
    err << "error: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace locklab::cli
