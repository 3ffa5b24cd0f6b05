#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "common.hpp"
#include "locklab/cnf.hpp"
#include "locklab/error.hpp"
#include "locklab/sat.hpp"

using namespace locklab;

namespace {

// Reference DIMACS reader: independent of the exporter.
std::vector<std::vector<int>> read_dimacs(const std::string& text, int& vars, int& clauses) {
  std::istringstream in(text);
  std::string p, cnf;
  in >> p >> cnf >> vars >> clauses;
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  int lit;
  while (in >> lit) {
    if (lit == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(lit);
    }
  }
  return out;
}

std::vector<std::vector<int>> clauses_of(const CnfFormula& f) {
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < f.num_clauses(); ++i) {
    std::vector<int> c;
    for (Lit l : f.clause(i)) c.push_back(l.dimacs());
    out.push_back(c);
  }
  return out;
}

// Encoded outputs under unit-assumed inputs, via the solver.
BitVector solve_outputs(const Circuit& c, const BitVector& in, bool fold) {
  CnfFormula f;
  VarMap vars;
  EncodeOptions opt;
  opt.fold = fold;
  Encoding e = tseitin_encode(c, f, vars, "c", opt);
  std::vector<Lit> assume;
  for (SignalId i = 0; i < c.num_inputs(); ++i) assume.push_back(in[i] ? e[i] : ~e[i]);
  SatSolver s(f);
  REQUIRE(s.solve(assume) == SatStatus::Sat);
  BitVector out(c.num_outputs());
  for (std::size_t j = 0; j < c.num_outputs(); ++j) out.set(j, s.value(e[c.output_ids()[j]]));
  return out;
}

}  // namespace

TEST_SUITE("cnf") {

TEST_CASE("textbook gate clauses") {
  Circuit c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
  CnfFormula f;
  VarMap vars;
  tseitin_encode(c, f, vars, "t");
  const int a = static_cast<int>(vars.at("t", "a")), b = static_cast<int>(vars.at("t", "b")),
            y = static_cast<int>(vars.at("t", "y"));
  CHECK(clauses_of(f) == std::vector<std::vector<int>>{{-y, a}, {-y, b}, {y, -a, -b}});

  Circuit n = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)");
  CnfFormula g;
  VarMap gv;
  tseitin_encode(n, g, gv, "t");
  CHECK(g.num_clauses() == 2);
  for (bool av : {false, true}) {
    const Lit la(gv.at("t", "a"), !av);
    auto r = solve(g, std::vector<Lit>{la});
    REQUIRE(r.status == SatStatus::Sat);
    CHECK(r.value(Lit(gv.at("t", "y"))) == !av);
  }
}

TEST_CASE("encoding matches simulation") {
  Circuit toy = testutil::toy();
  for (unsigned v = 0; v < 16; ++v) {
    BitVector in = BitVector::from_uint(v, 4);
    CHECK(solve_outputs(toy, in, false) == simulate(toy, in));
    CHECK(solve_outputs(toy, in, true) == simulate(toy, in));
  }
  Rng rng(3);
  for (const auto& name : {"c17", "c432", "c499", "c880", "c1908"}) {
    Circuit c = testutil::bench(name);
    for (int i = 0; i < 256; ++i) {
      BitVector in = testutil::random_bits(c.num_inputs(), rng);
      CHECK(solve_outputs(c, in, i % 2 == 0) == simulate(c, in));
    }
  }
  Circuit six = testutil::bench("../tests/data/toy6");
  for (unsigned v = 0; v < 64; ++v) {
    BitVector in = BitVector::from_uint(v, 6);
    CHECK(solve_outputs(six, in, false) == simulate(six, in));
  }
}

TEST_CASE("solve basics") {
  CnfFormula f;
  const Lit x(f.new_var());
  f.add_clause({x});
  auto r = solve(f);
  REQUIRE(r.status == SatStatus::Sat);
  CHECK(r.value(x));
  f.add_clause({~x});
  CHECK(solve(f).status == SatStatus::Unsat);
  CnfFormula g;
  g.new_var();
  CHECK_THROWS_AS(g.add_clause(std::vector<Lit>{}), Error);
  CHECK_THROWS_AS(g.add_clause({Lit(5)}), Error);
}

TEST_CASE("clause normalization") {
  CnfFormula f;
  const Lit a(f.new_var()), b(f.new_var());
  f.add_clause({a, a, b});
  f.add_clause({a, ~a});
  CHECK(f.num_clauses() == 1);
  CHECK(clauses_of(f) == std::vector<std::vector<int>>{{1, 2}});
}

TEST_CASE("DIMACS export") {
  CnfFormula f;
  const Lit x(f.new_var());
  f.add_clause({x});
  CHECK(export_dimacs(f) == "p cnf 1 1\n1 0\n");

  CnfFormula g;
  VarMap vars;
  tseitin_encode(testutil::bench("c432"), g, vars, "c");
  int nv = 0, nc = 0;
  auto back = read_dimacs(export_dimacs(g), nv, nc);
  CHECK(nv == static_cast<int>(g.num_vars()));
  CHECK(nc == static_cast<int>(g.num_clauses()));
  CHECK(back == clauses_of(g));
}

TEST_CASE("equivalence miter") {
  Circuit toy = testutil::toy();
  CHECK(check_equivalence(toy, toy).equivalent());
  Circuit inv = parse_bench(
      "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nOUTPUT(y)\nn1 = AND(a, b)\nn2 = OR(c, d)\ny = XNOR(n1, n2)\n");
  auto r = check_equivalence(toy, inv);
  CHECK(r.status == SatStatus::Sat);
  REQUIRE(r.counterexample);
  CHECK(simulate(toy, *r.counterexample) != simulate(inv, *r.counterexample));
  Circuit other_pi = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n");
  CHECK_THROWS_AS(build_equivalence_miter(toy, other_pi), InterfaceError);
  for (const auto& name : {"c432", "c499", "c880"}) CHECK(check_equivalence(testutil::bench(name), testutil::bench(name)).equivalent());
}

TEST_CASE("miter soundness against brute force") {
  Circuit six = testutil::bench("../tests/data/toy6");
  Rng rng(8);
  // Random single-gate mutations: UNSAT must coincide with exhaustive agreement.
  for (int t = 0; t < 40; ++t) {
    std::vector<Gate> gates = six.gates();
    Gate& g = gates[rng.below(gates.size())];
    if (g.fanins.size() >= 2) {
      static const GateKind kinds[] = {GateKind::And, GateKind::Or, GateKind::Nand,
                                       GateKind::Nor, GateKind::Xor, GateKind::Xnor};
      g.kind = kinds[rng.below(6)];
    }
    Circuit m(six.inputs(), six.outputs(), gates);
    bool agree = true;
    for (unsigned v = 0; v < 64; ++v) {
      BitVector in = BitVector::from_uint(v, 6);
      if (simulate(six, in) != simulate(m, in)) agree = false;
    }
    CHECK(check_equivalence(six, m).equivalent() == agree);
  }
}

TEST_CASE("key binding") {
  Circuit toy = testutil::toy();
  CircuitBuilder b(toy);
  b.add_input("k0");
  splice_xor(b, "y", "k0", "y_in");
  Circuit locked = b.build();
  CHECK(check_equivalence(toy, locked, KeyBinding{{"k0"}, BitVector::from_string("0")}).equivalent());
  CHECK_FALSE(check_equivalence(toy, locked, KeyBinding{{"k0"}, BitVector::from_string("1")}).equivalent());
  auto free_keys = check_equivalence(toy, locked, KeyBinding{{"k0"}, std::nullopt});
  CHECK(free_keys.status == SatStatus::Sat);
  CHECK(free_keys.counterexample->at("k0") == true);
  CHECK_THROWS_AS(check_equivalence(toy, locked), InterfaceError);
}

TEST_CASE("attack miter") {
  Circuit toy = testutil::toy();
  CircuitBuilder b(toy);
  b.add_input("k0");
  splice_xor(b, "y", "k0", "y_in");
  AttackMiter m = build_attack_miter(b.build(), {"k0"});
  SatSolver s(m.formula);
  std::vector<Lit> on{m.diff_enable};
  REQUIRE(s.solve(on) == SatStatus::Sat);
  CHECK(s.value(m.key1[0]) != s.value(m.key2[0]));

  AttackMiter plain = build_attack_miter(toy, {});
  CHECK(solve(plain.formula, std::vector<Lit>{plain.diff_enable}).status == SatStatus::Unsat);

  // DIP constraint: the complementary key is eliminated, the correct one survives.
  BitVector dip = BitVector::from_string("1100");
  add_dip_constraint(m, dip, simulate(toy, dip));
  add_dip_constraint(m, dip, simulate(toy, dip));
  CHECK(s.solve(on) == SatStatus::Unsat);
  std::vector<Lit> sk{~m.key1[0]};
  CHECK(s.solve(sk) == SatStatus::Sat);
  std::vector<Lit> wrong{m.key1[0]};
  CHECK(s.solve(wrong) == SatStatus::Unsat);
  CHECK_THROWS_AS(add_dip_constraint(m, BitVector(3), BitVector(1)), InterfaceError);
  CHECK_THROWS_AS(add_dip_constraint(m, BitVector(4), BitVector(2)), InterfaceError);
}

TEST_CASE("budget yields unknown") {
  CnfFormula f;
  // Pigeonhole 9 into 8: hard enough that a 1-conflict budget cannot finish.
  const int holes = 8, pigeons = 9;
  std::vector<std::vector<Lit>> x(pigeons);
  for (int p = 0; p < pigeons; ++p)
    for (int h = 0; h < holes; ++h) x[p].push_back(Lit(f.new_var()));
  for (int p = 0; p < pigeons; ++p) f.add_clause(x[p]);
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p < pigeons; ++p)
      for (int q = p + 1; q < pigeons; ++q) f.add_clause({~x[p][h], ~x[q][h]});
  SatBudget budget;
  budget.conflicts = 1;
  auto r = solve(f, {}, budget);
  CHECK(r.status == SatStatus::Unknown);
  CHECK_FALSE(r.model.has_value());
}

}  // TEST_SUITE
