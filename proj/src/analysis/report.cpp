#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "locklab/analysis.hpp"
#include "locklab/error.hpp"

namespace locklab {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <typename T>
void put_optional(ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

ordered_json attack_to_json(const AttackRecord& a, bool timings) {
  ordered_json j;
  j["attack"] = a.attack;
  j["status"] = std::string(to_string(a.status));
  j["iterations"] = a.iterations;
  j["oracle_queries"] = a.oracle_queries;
  if (timings) j["elapsed"] = a.elapsed;
  put_optional(j, "verified", a.verified);
  put_optional(j, "agreeing_keys", a.agreeing_keys);
  if (!a.key.empty()) j["key"] = a.key;
  return j;
}

AttackRecord attack_from_json(const json& j) {
  AttackRecord a;
  a.attack = j.at("attack").get<std::string>();
  const auto status = attack_status_from_string(j.at("status").get<std::string>());
  if (!status) throw Error("unknown attack status " + j.at("status").get<std::string>());
  a.status = *status;
  a.iterations = j.at("iterations").get<std::uint64_t>();
  a.oracle_queries = j.at("oracle_queries").get<std::uint64_t>();
  a.elapsed = j.value("elapsed", 0.0);
  a.verified = get_optional<bool>(j, "verified");
  a.agreeing_keys = get_optional<std::uint64_t>(j, "agreeing_keys");
  a.key = j.value("key", std::string());
  return a;
}

ordered_json record_to_json(const RunRecord& r, bool timings) {
  ordered_json j;
  j["circuit"] = r.circuit;
  j["technique"] = std::string(to_string(r.technique));
  j["n"] = r.n;
  j["m"] = r.m;
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["classic"] = r.classic;
  if (timings) j["lock_seconds"] = r.lock_seconds;
  j["gates_before"] = r.gates_before;
  j["gates_after"] = r.gates_after;
  j["equivalence"] = r.equivalence;
  j["valid"] = r.valid;
  j["obf_bits_nominal"] = r.obf_bits_nominal;
  j["obf_bits_structural"] = r.obf_bits_structural;
  ordered_json attacks = ordered_json::array();
  for (const auto& a : r.attacks) attacks.push_back(attack_to_json(a, timings));
  j["attacks"] = std::move(attacks);
  if (r.corruption) {
    j["corruption"] = {{"differing", r.corruption->differing},
                       {"total", r.corruption->total},
                       {"exhaustive", r.corruption->exhaustive}};
  }
  put_optional(j, "mapping_exponent", r.mapping_exponent);
  put_optional(j, "mapping_resolved", r.mapping_resolved);
  put_optional(j, "critical_signals", r.critical_signals);
  put_optional(j, "removal_partial", r.removal_partial);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.circuit = j.at("circuit").get<std::string>();
  const auto kind = technique_from_string(j.at("technique").get<std::string>());
  if (!kind) throw Error("unknown technique " + j.at("technique").get<std::string>());
  r.technique = *kind;
  r.n = j.at("n").get<std::size_t>();
  r.m = j.at("m").get<std::size_t>();
  r.k = j.at("k").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.classic = j.value("classic", false);
  r.lock_seconds = j.value("lock_seconds", 0.0);
  r.gates_before = j.at("gates_before").get<std::size_t>();
  r.gates_after = j.at("gates_after").get<std::size_t>();
  r.equivalence = j.at("equivalence").get<std::string>();
  r.valid = j.at("valid").get<bool>();
  r.obf_bits_nominal = j.value("obf_bits_nominal", std::size_t{0});
  r.obf_bits_structural = j.value("obf_bits_structural", std::size_t{0});
  for (const auto& a : j.at("attacks")) r.attacks.push_back(attack_from_json(a));
  if (j.contains("corruption")) {
    const auto& c = j.at("corruption");
    r.corruption = CorruptionRecord{c.at("differing").get<std::uint64_t>(), c.at("total").get<std::uint64_t>(),
                                    c.at("exhaustive").get<bool>()};
  }
  r.mapping_exponent = get_optional<double>(j, "mapping_exponent");
  r.mapping_resolved = get_optional<std::size_t>(j, "mapping_resolved");
  r.critical_signals = get_optional<std::size_t>(j, "critical_signals");
  r.removal_partial = get_optional<bool>(j, "removal_partial");
  r.error = j.value("error", std::string());
  return r;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::vector<std::size_t> parse_range(const json& j, const char* what) {
  std::vector<std::size_t> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<std::size_t>());
  } else if (j.is_object()) {
    const auto from = j.at("from").get<std::size_t>();
    const auto to = j.at("to").get<std::size_t>();
    const auto step = j.value("step", std::size_t{1});
    if (step == 0) throw Error(std::string("plan: ") + what + " step must be positive");
    for (std::size_t v = from; v <= to; v += step) out.push_back(v);
  } else if (j.is_number_unsigned()) {
    out.push_back(j.get<std::size_t>());
  } else {
    throw Error(std::string("plan: ") + what + " must be a list, a number or {from, to, step}");
  }
  return out;
}

}  // namespace

ExperimentPlan plan_from_json(std::string_view text, const std::string& base_dir) {
  static const std::vector<std::string> kKnown = {
      "circuits", "techniques", "n", "m", "seeds", "attacks", "timeout", "max_iterations", "removal_timeout",
      "corruption_samples", "blend", "blend_rounds", "classic_cac", "workers", "output_dir"};
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw Error("plan: top level must be an object");
    for (const auto& [key, value] : j.items()) {
      if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) throw Error("plan: unknown field '" + key + "'");
    }
    ExperimentPlan p;
    for (const auto& c : j.at("circuits")) {
      std::filesystem::path path(c.get<std::string>());
      if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
      p.circuits.push_back(path.lexically_normal().string());
    }
    for (const auto& t : j.at("techniques")) {
      const auto kind = technique_from_string(t.get<std::string>());
      if (!kind) throw Error("plan: unknown technique '" + t.get<std::string>() + "'");
      p.techniques.push_back(*kind);
    }
    p.n_values = parse_range(j.at("n"), "n");
    if (j.contains("m")) p.m_values = parse_range(j.at("m"), "m");
    p.seeds = j.contains("seeds") ? j.at("seeds").get<std::vector<std::uint64_t>>() : std::vector<std::uint64_t>{0xC0FFEE};
    if (j.contains("attacks")) {
      p.sat_attack = false;
      for (const auto& a : j.at("attacks")) {
        const auto name = a.get<std::string>();
        if (name == "sat") p.sat_attack = true;
        else if (name == "brute") p.brute_force = true;
        else if (name == "mapping") p.mapping_probe = true;
        else if (name == "removal") p.removal_probe = true;
        else throw Error("plan: unknown attack '" + name + "'");
      }
    }
    if (j.contains("timeout")) p.limits.seconds = j.at("timeout").get<double>();
    p.limits.max_iterations = get_optional<std::uint64_t>(j, "max_iterations");
    p.removal_seconds = get_optional<double>(j, "removal_timeout");
    p.corruption_samples = j.value("corruption_samples", p.corruption_samples);
    p.lock.blend = j.value("blend", true);
    p.lock.blend_rounds = j.value("blend_rounds", 2u);
    p.lock.classic_cac = j.value("classic_cac", false);
    p.workers = j.value("workers", 0u);
    p.output_dir = j.value("output_dir", std::string());
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw Error(std::string("plan: ") + e.what());
  }
}

std::string plan_to_json(const ExperimentPlan& p) {
  ordered_json j;
  j["circuits"] = p.circuits;
  ordered_json techs = ordered_json::array();
  for (auto t : p.techniques) techs.push_back(std::string(to_string(t)));
  j["techniques"] = techs;
  j["n"] = p.n_values;
  if (!p.m_values.empty()) j["m"] = p.m_values;
  j["seeds"] = p.seeds;
  std::vector<std::string> attacks;
  if (p.sat_attack) attacks.push_back("sat");
  if (p.brute_force) attacks.push_back("brute");
  if (p.mapping_probe) attacks.push_back("mapping");
  if (p.removal_probe) attacks.push_back("removal");
  j["attacks"] = attacks;
  if (p.limits.seconds) j["timeout"] = *p.limits.seconds;
  if (p.limits.max_iterations) j["max_iterations"] = *p.limits.max_iterations;
  if (p.removal_seconds) j["removal_timeout"] = *p.removal_seconds;
  j["corruption_samples"] = p.corruption_samples;
  j["blend"] = p.lock.blend;
  j["blend_rounds"] = p.lock.blend_rounds;
  j["classic_cac"] = p.lock.classic_cac;
  j["workers"] = p.workers;
  if (!p.output_dir.empty()) j["output_dir"] = p.output_dir;
  return j.dump(2) + "\n";
}

std::string records_to_json(const std::vector<RunRecord>& records, const ReportOptions& opt) {
  ordered_json j = ordered_json::array();
  for (const auto& r : records) j.push_back(record_to_json(r, opt.timings));
  return j.dump(2) + "\n";
}

std::vector<RunRecord> records_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (!j.is_array()) throw Error("report: expected an array of records");
    std::vector<RunRecord> out;
    for (const auto& r : j) out.push_back(record_from_json(r));
    return out;
  } catch (const json::exception& e) {
    throw Error(std::string("report: ") + e.what());
  }
}

std::string records_to_csv(const std::vector<RunRecord>& records, const ReportOptions& opt) {
  std::ostringstream out;
  out << "circuit,technique,n,m,k,seed,classic,gates_before,gates_after,overhead,equivalence,valid,"
         "attack,status,iterations,oracle_queries,elapsed,verified,corruption_rate,mapping_exponent,"
         "critical_signals,error\n";
  for (const auto& r : records) {
    const std::string head = csv_field(r.circuit) + ',' + std::string(to_string(r.technique)) + ',' +
                             std::to_string(r.n) + ',' + std::to_string(r.m) + ',' + std::to_string(r.k) + ',' +
                             std::to_string(r.seed) + ',' + (r.classic ? "1" : "0") + ',' +
                             std::to_string(r.gates_before) + ',' + std::to_string(r.gates_after) + ',' +
                             fixed(gate_overhead(r), 6) + ',' + r.equivalence + ',' + (r.valid ? "1" : "0");
    std::string tail;
    tail += ',' + (r.corruption ? fixed(r.corruption->total ? static_cast<double>(r.corruption->differing) /
                                                                   static_cast<double>(r.corruption->total)
                                                             : 0.0,
                                         9)
                                : std::string());
    tail += ',' + (r.mapping_exponent ? fixed(*r.mapping_exponent, 3) : std::string());
    tail += ',' + (r.critical_signals ? std::to_string(*r.critical_signals) : std::string());
    tail += ',' + csv_field(r.error);
    if (r.attacks.empty()) {
      out << head << ",,,,,," << tail << '\n';
      continue;
    }
    for (const auto& a : r.attacks) {
      out << head << ',' << a.attack << ',' << to_string(a.status) << ',' << a.iterations << ',' << a.oracle_queries
          << ',' << (opt.timings ? fixed(a.elapsed, 6) : std::string()) << ',' << (a.verified ? (*a.verified ? "1" : "0") : "") << tail << '\n';
    }
  }
  return out.str();
}

void write_report(const std::vector<RunRecord>& records, ReportFormat format, const std::string& path,
                  const ReportOptions& opt) {
  write_file_atomic(path, format == ReportFormat::Json ? records_to_json(records, opt) : records_to_csv(records, opt));
}

std::string attack_result_json(const AttackResult& r, bool with_trace) {
  ordered_json j = attack_to_json(summarize(r), true);
  if (with_trace) {
    ordered_json trace = ordered_json::array();
    for (const auto& d : r.dip_trace) trace.push_back({{"input", d.input.to_hex()}, {"output", d.output.to_hex()}});
    j["dip_trace"] = std::move(trace);
  }
  return j.dump(2) + "\n";
}

std::string mapping_report_json(const MappingReport& r) {
  ordered_json j;
  j["method"] = std::string(to_string(r.method));
  j["resolved"] = r.resolved;
  j["raw_exponent"] = r.raw_exponent;
  j["ambiguity_exponent"] = r.ambiguity_exponent;
  ordered_json keys = ordered_json::array();
  for (const auto& k : r.keys) keys.push_back({{"key", k.key}, {"candidates", k.candidates}});
  j["keys"] = std::move(keys);
  return j.dump(2) + "\n";
}

std::string removal_report_json(const RemovalReport& r) {
  ordered_json j;
  ordered_json crit = ordered_json::array();
  for (const auto& c : r.critical) crit.push_back({{"signal", c.signal}, {"value", c.value ? 1 : 0}});
  j["critical"] = std::move(crit);
  j["scanned"] = r.scanned;
  j["candidates"] = r.candidates;
  j["sat_checks"] = r.sat_checks;
  j["partial"] = r.partial;
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, std::string_view content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace locklab
