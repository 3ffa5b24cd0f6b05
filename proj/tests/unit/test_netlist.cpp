#include <doctest.h>

#include <algorithm>
#include <set>

#include "common.hpp"
#include "locklab/blend.hpp"
#include "locklab/error.hpp"
#include "locklab/netlist.hpp"
#include "locklab/sat.hpp"

using namespace locklab;
using testutil::toy;

namespace {

const std::vector<std::string> kCorpus = {"c17", "c432", "c499", "c880", "c1355", "c1908", "c2670", "c5315"};

Assignment toy_input(bool a, bool b, bool c, bool d) { return {{"a", a}, {"b", b}, {"c", c}, {"d", d}}; }

}  // namespace

TEST_SUITE("netlist") {

TEST_CASE("parse minimal file") {
  Circuit c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
  CHECK(c.num_inputs() == 2);
  CHECK(c.num_outputs() == 1);
  CHECK(c.num_gates() == 1);
  CHECK(c.gates()[0].kind == GateKind::And);
}

TEST_CASE("parse tolerates case, spacing, comments and BUF") {
  Circuit c = parse_bench("# header\n  input( a )\nInPut(b)\noutput(y)\n\ny=and(a,b) # trailing\nz = buf(y)\n");
  CHECK(c.num_inputs() == 2);
  CHECK(c.gates()[1].kind == GateKind::Buff);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_bench("y = AND(a, b)"), ParseError);
  try {
    parse_bench("INPUT(a)\nOUTPUT(y)\ny = FOO(a, a)\n");
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  try {
    parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b\n");
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(parse_bench("INPUT(a)\nINPUT(a)\n"), ParseError);
  CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\ny = BUFF(a)\n"), ParseError);
  CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a, a)\n"), ParseError);
  CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(q)\ny = NOT(a)\n"), ParseError);
  CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, z)\nz = AND(a, y)\n"), NetlistError);
}

TEST_CASE("vendored c2670 interface counts") {
  Circuit c = testutil::bench("c2670");
  CHECK(c.num_inputs() == 157);
  CHECK(c.num_outputs() == 64);
}

TEST_CASE("write/parse round trip is structural identity") {
  for (const auto& name : kCorpus) {
    CAPTURE(name);
    Circuit c = testutil::bench(name);
    CHECK(parse_bench(write_bench(c)) == c);
  }
  Circuit one = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
  CHECK(parse_bench(write_bench(one)) == one);
  CHECK(write_bench(one).rfind("INPUT(a)", 0) == 0);
  const std::string with_header = write_bench(one, {"locklab: technique=cac, seed=7"});
  CHECK(with_header.rfind("# locklab: technique=cac, seed=7\nINPUT(a)", 0) == 0);
}

TEST_CASE("constants are lowered on write") {
  CircuitBuilder b;
  b.add_input("a");
  b.add_gate(GateKind::Const1, {}, "one");
  b.add_gate(GateKind::Const0, {}, "zero");
  b.add_gate(GateKind::Or, {"one", "zero"}, "y");
  b.add_output("y");
  Circuit c = b.build();
  const std::string text = write_bench(c);
  CHECK(text.find("one = XNOR(a, a)") != std::string::npos);
  CHECK(text.find("zero = XOR(a, a)") != std::string::npos);
  Circuit back = parse_bench(text);
  for (bool a : {false, true}) CHECK(simulate(back, Assignment{{"a", a}}).at("y") == true);
}

TEST_CASE("topological order") {
  Circuit chain = parse_bench("INPUT(a)\nOUTPUT(n2)\nn2 = NOT(n1)\nn1 = NOT(a)\n");
  CHECK(topo_order(chain) == std::vector<std::string>{"n1", "n2"});
  for (const auto& name : kCorpus) {
    Circuit c = testutil::bench(name);
    std::set<std::string> done(c.inputs().begin(), c.inputs().end());
    for (const auto& g : topo_order(c)) {
      const Gate& gate = c.gate(c.id(g));
      for (const auto& f : gate.fanins) CHECK(done.count(f) == 1);
      done.insert(g);
    }
    CHECK(done.size() == c.num_signals());
  }
  auto order = topo_order(toy());
  auto pos = [&](const std::string& n) { return std::find(order.begin(), order.end(), n) - order.begin(); };
  CHECK(pos("n1") < pos("y"));
  CHECK(pos("n2") < pos("y"));
}

TEST_CASE("simulate toy by hand") {
  Circuit c = toy();
  CHECK(simulate(c, toy_input(1, 1, 0, 0)).at("y") == true);
  CHECK(simulate(c, toy_input(0, 0, 0, 0)).at("y") == false);
  CHECK_THROWS_AS(simulate(c, Assignment{{"a", true}}), InterfaceError);
}

TEST_CASE("simulate agrees with the recursive evaluator") {
  Rng rng(11);
  for (const auto& name : kCorpus) {
    CAPTURE(name);
    Circuit c = testutil::bench(name);
    const int vectors = 1000;
    std::vector<Assignment> batch;
    for (int i = 0; i < vectors; ++i) batch.push_back(testutil::random_assignment(c, rng));
    auto fast = simulate_batch(c, std::span<const Assignment>(batch));
    REQUIRE(fast.size() == batch.size());
    int mismatches = 0;
    for (int i = 0; i < vectors; ++i) {
      if (testutil::eval_reference(c, batch[i]) != fast[i]) ++mismatches;
      if (i < 64 && simulate(c, batch[i]) != fast[i]) ++mismatches;
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("simulate_batch edge cases") {
  Circuit c = toy();
  CHECK(simulate_batch(c, std::span<const Assignment>()).empty());
  std::vector<BitVector> all;
  for (unsigned v = 0; v < 16; ++v) all.push_back(BitVector::from_uint(v, 4));
  auto outs = simulate_batch(c, std::span<const BitVector>(all));
  for (unsigned v = 0; v < 16; ++v) {
    const bool a = v & 1, b = v & 2, cc = v & 4, d = v & 8;
    CHECK(outs[v][0] == ((a && b) != (cc || d)));
  }
}

TEST_CASE("fanin cones") {
  Circuit c = toy();
  Cone y = fanin_cone(c, "y");
  CHECK(y.inputs == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(y.gates == std::vector<std::string>{"n1", "n2", "y"});
  CHECK(fanin_cone(c, "n1").inputs == std::vector<std::string>{"a", "b"});
  Cone pi = fanin_cone(c, "a");
  CHECK(pi.gates.empty());
  CHECK(pi.inputs == std::vector<std::string>{"a"});
  CHECK_THROWS_AS(fanin_cone(c, "nope"), NetlistError);
}

TEST_CASE("cone PI counts are monotone along fanouts") {
  for (const auto& name : {"c432", "c2670"}) {
    Circuit c = testutil::bench(name);
    ConeSets sets = cone_input_sets(c);
    auto counts = cone_input_counts(c);
    for (SignalId s = 0; s < c.num_signals(); ++s) {
      for (SignalId t : c.fanouts(s)) {
        CHECK(counts[s] <= counts[t]);
        for (std::size_t w = 0; w < sets.words_per_signal; ++w) {
          const auto a = sets.bits[s * sets.words_per_signal + w];
          const auto b = sets.bits[t * sets.words_per_signal + w];
          CHECK((a & ~b) == 0);
        }
      }
    }
    for (SignalId po : c.output_ids()) CHECK(counts[po] == fanin_cone(c, c.name(po)).inputs.size());
  }
}

TEST_CASE("select_target") {
  Circuit c = toy();
  Rng rng(1);
  CHECK(select_target(c, 4, rng) == "y");
  try {
    select_target(c, 5, rng);
    FAIL("expected error");
  } catch (const InfeasibleError& e) {
    CHECK(e.max_available() == 4);
  }
  Circuit big = testutil::bench("c2670");
  Rng r1(99), r2(99);
  const std::string t1 = select_target(big, 32, r1);
  CHECK(t1 == select_target(big, 32, r2));
  CHECK(fanin_cone(big, t1).inputs.size() >= 32);
}

TEST_CASE("splice_xor") {
  Circuit c = toy();
  auto exhaustive_equal = [](const Circuit& a, const Circuit& b, bool complement) {
    for (unsigned v = 0; v < 16; ++v) {
      BitVector in = BitVector::from_uint(v, 4);
      BitVector oa = simulate(a, in);
      BitVector ob = simulate(b, in.concat(BitVector(b.num_inputs() - 4)));
      if ((oa[0] != ob[0]) != complement) return false;
    }
    return true;
  };
  for (bool one : {false, true}) {
    CircuitBuilder b(c);
    b.add_gate(one ? GateKind::Const1 : GateKind::Const0, {}, "k");
    splice_xor(b, "y", "k", "y_pre");
    Circuit spliced = b.build();
    CHECK(spliced.outputs() == c.outputs());
    CHECK(exhaustive_equal(c, spliced, one));
  }
  // Internal splice with a fresh PI p: y flips exactly when p=1 (n1 always reaches y through XOR).
  CircuitBuilder b(c);
  b.add_input("p");
  CHECK(splice_xor(b, "n1", "p", "n1x") == "n1x");
  Circuit s = b.build();
  for (unsigned v = 0; v < 32; ++v) {
    BitVector in = BitVector::from_uint(v, 5);
    const bool flipped = simulate(s, in)[0] != simulate(c, in.slice(0, 4))[0];
    CHECK(flipped == in[4]);
  }
  CHECK_THROWS_AS(splice_xor(c, "n1", "y", "z"), NetlistError);
  CHECK_THROWS_AS(splice_xor(c, "n1", "a", "n2"), NetlistError);
  CHECK_THROWS_AS(splice_xor(c, "zz", "a", "q"), NetlistError);
}

TEST_CASE("structural_blend preserves function and interface") {
  for (const auto& name : {"toy", "c17", "c432", "c880"}) {
    CAPTURE(name);
    Circuit c = std::string(name) == "toy" ? toy() : testutil::bench(name);
    for (std::uint64_t seed : {1, 2, 3}) {
      Rng rng(seed);
      BlendResult r = structural_blend(c, rng, 2);
      CHECK(r.circuit.inputs() == c.inputs());
      CHECK(r.circuit.outputs() == c.outputs());
      CHECK(check_equivalence(c, r.circuit).equivalent());
      for (const auto& g : r.circuit.gates()) {
        CHECK(g.fanins.size() <= 2);
        const bool io = std::find(c.outputs().begin(), c.outputs().end(), g.name) != c.outputs().end();
        CHECK((io || g.name[0] == 'g'));
      }
      // Renamed signals keep their function.
      Rng vr(seed + 100);
      for (int t = 0; t < 20; ++t) {
        std::vector<std::uint64_t> words(c.num_inputs());
        for (auto& w : words) w = vr.next();
        auto va = simulate_words(c, words);
        auto vb = simulate_words(r.circuit, words);
        for (const auto& [old_name, new_name] : r.renamed) {
          CHECK(va[c.id(old_name)] == vb[r.circuit.id(new_name)]);
        }
      }
    }
  }
  Circuit c = testutil::bench("c432");
  Rng a(5), b(6);
  auto ra = structural_blend(c, a, 2);
  auto rb = structural_blend(c, b, 2);
  CHECK_FALSE(ra.circuit == rb.circuit);
  CHECK(check_equivalence(ra.circuit, rb.circuit).equivalent());
}

}  // TEST_SUITE
