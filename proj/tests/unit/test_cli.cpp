#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "common.hpp"
#include "locklab/analysis.hpp"
#include "locklab/cli.hpp"

namespace fs = std::filesystem;
using namespace locklab;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "locklab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("locklab_cli_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::string c432 = testutil::data_path("benchmarks/c432.bench");
const std::string c17 = testutil::data_path("benchmarks/c17.bench");
const std::string toy6 = testutil::data_path("tests/data/toy6.bench");

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("lock, verify and attack round trip") {
  TempDir d;
  auto r = run({"lock", c432, "-t", "sarlock", "--n", "6", "--seed", "9", "-o", d / "l.bench"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("k=6") != std::string::npos);
  CHECK(r.out.find("seed=9") != std::string::npos);
  CHECK(fs::exists(d / "l.key"));

  const std::string bench_text = read_text_file(d / "l.bench");
  CHECK(bench_text.rfind("# locklab: technique=sarlock, n=6, m=0, seed=9", 0) == 0);
  // the secret key never leaks into the netlist
  const KeyFile kf = read_keyfile(read_text_file(d / "l.key"));
  CHECK(bench_text.find(kf.bits.to_string()) == std::string::npos);

  CHECK(run({"verify", d / "l.bench", d / "l.key", c432}).code == cli::kOk);

  r = run({"attack", d / "l.bench", "--oracle", c432, "-o", d / "a.json", "--trace", d / "t.csv"});
  REQUIRE(r.code == cli::kOk);
  const auto j = nlohmann::json::parse(read_text_file(d / "a.json"));
  CHECK(j["status"] == "KeyFound");
  CHECK(j["iterations"] == 63);
  CHECK(j["verified"] == true);
  CHECK(j["seed"] == cli::kDefaultSeed);
  CHECK(read_text_file(d / "t.csv").rfind("iteration,input_hex,output_hex", 0) == 0);
}

TEST_CASE("verify reports a wrong key with a counterexample") {
  TempDir d;
  REQUIRE(run({"lock", c432, "-t", "cac", "--n", "5", "-o", d / "l.bench"}).code == cli::kOk);
  KeyFile kf = read_keyfile(read_text_file(d / "l.key"));
  kf.bits.flip(0);
  std::string text = "# keys=" + std::to_string(kf.names.size()) + "\n";
  for (std::size_t i = 0; i < kf.names.size(); ++i) text += kf.names[i] + "=" + (kf.bits[i] ? "1" : "0") + "\n";
  write_file_atomic(d / "bad.key", text);
  const auto r = run({"verify", d / "l.bench", d / "bad.key", c432});
  CHECK(r.code == cli::kMismatch);
  CHECK(r.out.find("counterexample:") != std::string::npos);
}

TEST_CASE("exit codes") {
  TempDir d;
  SUBCASE("infeasible n names the largest feasible one") {
    const auto r = run({"lock", c17, "-t", "cac", "--n", "9", "-o", d / "x.bench"});
    CHECK(r.code == cli::kInfeasible);
    CHECK(r.err.find("max feasible n = 4") != std::string::npos);
    CHECK_FALSE(fs::exists(d / "x.bench"));
  }
  SUBCASE("usage and I/O errors") {
    CHECK(run({"lock"}).code == cli::kUsage);
    CHECK(run({"frobnicate"}).code == cli::kUsage);
    CHECK(run({"lock", c17, "-t", "nope", "--n", "2"}).code == cli::kUsage);
    CHECK(run({"info", d / "missing.bench"}).code == cli::kUsage);
    CHECK(run({"attack", c17, "--oracle", c17, "--attack", "psychic"}).code == cli::kUsage);
    CHECK(run({"--help"}).code == cli::kOk);
  }
  SUBCASE("timeout") {
    REQUIRE(run({"lock", c432, "-t", "sarlock", "--n", "8", "-o", d / "l.bench"}).code == cli::kOk);
    const auto r = run({"attack", d / "l.bench", "--oracle", c432, "--max-iterations", "3"});
    CHECK(r.code == cli::kTimeout);
    CHECK(r.out.find("status=Timeout") != std::string::npos);
  }
  SUBCASE("interface mismatch") {
    REQUIRE(run({"lock", c432, "-t", "cac", "--n", "4", "-o", d / "l.bench"}).code == cli::kOk);
    CHECK(run({"attack", d / "l.bench", "--oracle", c17}).code == cli::kUsage);
  }
}

TEST_CASE("seed falls back to the environment") {
  TempDir d;
  ::setenv("LOCKLAB_SEED", "77", 1);
  auto a = run({"lock", c432, "-t", "cac2", "--n", "6", "--m", "3", "-o", d / "a.bench"});
  ::unsetenv("LOCKLAB_SEED");
  auto b = run({"lock", c432, "-t", "cac2", "--n", "6", "--m", "3", "--seed", "77", "-o", d / "b.bench"});
  REQUIRE(a.code == cli::kOk);
  REQUIRE(b.code == cli::kOk);
  CHECK(read_text_file(d / "a.key") == read_text_file(d / "b.key"));
  CHECK(cli::effective_seed(std::nullopt) == cli::kDefaultSeed);
  ::setenv("LOCKLAB_SEED", "abc", 1);
  CHECK_THROWS(cli::effective_seed(std::nullopt));
  ::unsetenv("LOCKLAB_SEED");
}

TEST_CASE("analyze probes") {
  TempDir d;
  REQUIRE(run({"lock", toy6, "-t", "sarlock", "--n", "4", "--no-blend", "-o", d / "s.bench"}).code == cli::kOk);
  auto r = run({"analyze", d / "s.bench", "--probe", "removal", "--original", toy6, "-o", d / "r.json"});
  REQUIRE(r.code == cli::kOk);
  auto j = nlohmann::json::parse(read_text_file(d / "r.json"));
  CHECK(j["critical"].size() >= 1);

  r = run({"analyze", d / "s.bench", "--probe", "corruption", "--original", toy6, "-o", d / "c.json"});
  REQUIRE(r.code == cli::kOk);
  j = nlohmann::json::parse(read_text_file(d / "c.json"));
  CHECK(j["exhaustive"] == true);
  CHECK(j["total"] == 64);

  r = run({"analyze", d / "s.bench", "--probe", "corruption", "--original", toy6, "--key", d / "s.key"});
  CHECK(r.out.find("rate=0 (0/64)") != std::string::npos);

  REQUIRE(run({"lock", c432, "-t", "cac", "--n", "6", "--no-blend", "-o", d / "m.bench"}).code == cli::kOk);
  r = run({"analyze", d / "m.bench", "--probe", "mapping"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("resolved=6") != std::string::npos);
  CHECK(r.out.find("ambiguity_exponent=6") != std::string::npos);

  CHECK(run({"analyze", d / "m.bench", "--probe", "removal"}).code == cli::kUsage);
}

TEST_CASE("sweep writes byte-identical reports") {
  TempDir d;
  const std::string plan = R"({"circuits": [")" + toy6 + R"("], "techniques": ["sarlock", "cac"], "n": [3, 4],
    "seeds": [1, 2], "attacks": ["sat"], "workers": 3})";
  write_file_atomic(d / "plan.json", plan);
  REQUIRE(run({"sweep", d / "plan.json", "--out-dir", d / "r1"}).code == cli::kOk);
  REQUIRE(run({"sweep", d / "plan.json", "--out-dir", d / "r2", "--workers", "1"}).code == cli::kOk);
  CHECK(read_text_file(d / "r1/records.json") == read_text_file(d / "r2/records.json"));
  CHECK(read_text_file(d / "r1/records.csv") == read_text_file(d / "r2/records.csv"));
  CHECK(records_from_json(read_text_file(d / "r1/records.json")).size() == 8);

  write_file_atomic(d / "bad.json", R"({"circuits": [")" + toy6 + R"("], "techniques": ["cac"], "n": [], "seeds": [1]})");
  CHECK(run({"sweep", d / "bad.json", "--out-dir", d / "r3"}).code == cli::kUsage);
}

TEST_CASE("key input detection") {
  Circuit c = parse_bench(R"(INPUT(a)
INPUT(keyinput0)
INPUT(keyinputx)
INPUT(keyinput12)
OUTPUT(y)
y = AND(a, keyinput0, keyinputx, keyinput12)
)");
  CHECK(cli::detect_key_inputs(c) == std::vector<std::string>{"keyinput0", "keyinput12"});
}

}  // TEST_SUITE
