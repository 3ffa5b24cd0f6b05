#include <doctest.h>

#include <filesystem>

#include "common.hpp"
#include "locklab/analysis.hpp"
#include "locklab/error.hpp"

using namespace locklab;

namespace {

ExperimentPlan base_plan(std::vector<std::string> circuits, std::vector<TechniqueKind> techniques,
                         std::vector<std::size_t> ns) {
  ExperimentPlan p;
  for (auto& c : circuits) p.circuits.push_back(testutil::data_path(c));
  p.techniques = std::move(techniques);
  p.n_values = std::move(ns);
  p.seeds = {1};
  return p;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("sweep reproduces the DIP law on a toy") {
  auto plan = base_plan({"tests/data/toy6.bench"}, {TechniqueKind::SarLock}, {3, 4, 5});
  auto records = run_sweep(plan);
  REQUIRE(records.size() == 3);
  const std::uint64_t expect[] = {7, 15, 31};
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(records[i].error.empty());
    CHECK(records[i].valid);
    CHECK(records[i].equivalence == "UNSAT");
    CHECK(records[i].n == 3 + i);
    REQUIRE(records[i].attacks.size() == 1);
    CHECK(records[i].attacks[0].status == AttackStatus::KeyFound);
    CHECK(records[i].attacks[0].iterations == expect[i]);
    CHECK(*records[i].attacks[0].verified);
    REQUIRE(records[i].corruption);
    CHECK(records[i].corruption->exhaustive);
  }
}

TEST_CASE("CAC2 plans default m to n/2") {
  auto plan = base_plan({"benchmarks/c880.bench"}, {TechniqueKind::Cac2}, {4, 6, 8});
  plan.sat_attack = false;
  auto records = run_sweep(plan);
  REQUIRE(records.size() == 3);
  const std::size_t k[] = {12, 18, 24};
  for (std::size_t i = 0; i < 3; ++i) {
    CAPTURE(records[i].error);
    CHECK(records[i].m == records[i].n / 2);
    CHECK(records[i].k == k[i]);
    CHECK(records[i].valid);
    CHECK(records[i].obf_bits_nominal == records[i].n + 2 * records[i].m);
    CHECK(records[i].obf_bits_structural == records[i].n + records[i].m);
  }
  CHECK(run_sweep(base_plan({"benchmarks/c880.bench"}, {}, {4})).empty());
}

TEST_CASE("failures are recorded, not dropped") {
  auto plan = base_plan({"benchmarks/c17.bench"}, {TechniqueKind::Cac, TechniqueKind::Cac2}, {3, 9});
  plan.sat_attack = false;
  auto records = run_sweep(plan);
  REQUIRE(records.size() == 4);
  CHECK(records[0].error.empty());
  CHECK_FALSE(records[1].error.empty());
  CHECK_FALSE(records[1].valid);
  CHECK_FALSE(records[3].error.empty());
}

TEST_CASE("gate overhead") {
  RunRecord r;
  r.gates_before = r.gates_after = 10;
  CHECK(gate_overhead(r) == 0.0);
  CHECK(gate_overhead(3, 13) == doctest::Approx(10.0 / 3.0));
  auto plan = base_plan({"benchmarks/c432.bench"}, {TechniqueKind::Cac, TechniqueKind::Cac2}, {6});
  plan.sat_attack = false;
  plan.m_values = {3};
  auto records = run_sweep(plan);
  REQUIRE(records.size() == 2);
  CHECK(gate_overhead(records[1]) > gate_overhead(records[0]));
}

TEST_CASE("reports are deterministic and read back") {
  auto plan = base_plan({"benchmarks/c432.bench", "tests/data/toy6.bench"},
                        {TechniqueKind::SarLock, TechniqueKind::Cac, TechniqueKind::Cac2}, {3, 4});
  plan.seeds = {1, 2};
  plan.mapping_probe = true;
  plan.workers = 4;
  const auto a = run_sweep(plan);
  plan.workers = 1;
  const auto b = run_sweep(plan);
  CHECK(records_to_json(a) == records_to_json(b));

  ReportOptions timed;
  timed.timings = true;
  CHECK(records_from_json(records_to_json(a, timed)) == a);
  auto untimed = records_from_json(records_to_json(a));
  REQUIRE(untimed.size() == a.size());
  CHECK(untimed[0].circuit == a[0].circuit);

  CHECK(records_to_json({}) == "[]\n");
  const std::string csv = records_to_csv({});
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
  for (const auto& col : {"n", "m", "k", "iterations", "elapsed"}) {
    CHECK(csv.find(std::string(",") + col + ",") != std::string::npos);
  }
  const std::string full = records_to_csv(a);
  CHECK(std::count(full.begin(), full.end(), '\n') == static_cast<long>(a.size() + 1));
}

TEST_CASE("plan parsing") {
  ExperimentPlan p = plan_from_json(R"({"circuits": ["c17.bench"], "techniques": ["sarlock", "cac2"],
      "n": {"from": 3, "to": 9, "step": 2}, "seeds": [4], "attacks": ["sat", "removal"], "timeout": 30})",
                                    "/data");
  CHECK(p.circuits == std::vector<std::string>{"/data/c17.bench"});
  CHECK(p.n_values == std::vector<std::size_t>{3, 5, 7, 9});
  CHECK(p.removal_probe);
  CHECK_FALSE(p.brute_force);
  CHECK(*p.limits.seconds == 30.0);
  ExperimentPlan back = plan_from_json(plan_to_json(p));
  CHECK(back.n_values == p.n_values);
  CHECK(back.techniques == p.techniques);

  CHECK_THROWS_AS(plan_from_json(R"({"circuits": [], "techniques": [], "n": []})"), Error);
  CHECK_THROWS_AS(plan_from_json(R"({"circuits": [], "techniques": ["foo"], "n": [3]})"), Error);
  CHECK_THROWS_AS(plan_from_json(R"({"circuits": [], "techniques": [], "n": [3], "bogus": 1})"), Error);
  CHECK_THROWS_AS(plan_from_json(R"({"circuits": [], "techniques": [], "n": [0]})"), Error);
  CHECK_THROWS_AS(plan_from_json("{"), Error);
}

TEST_CASE("atomic report writes") {
  const auto dir = std::filesystem::temp_directory_path() / "locklab_report_test";
  std::filesystem::remove_all(dir);
  const std::string path = (dir / "sub" / "r.json").string();
  write_report({}, ReportFormat::Json, path);
  CHECK(read_text_file(path) == "[]\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  write_report({}, ReportFormat::Csv, path);
  CHECK(read_text_file(path).rfind("circuit,technique", 0) == 0);
  CHECK_THROWS_AS(read_text_file((dir / "missing").string()), Error);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
