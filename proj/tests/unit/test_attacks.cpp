#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "locklab/attacks.hpp"
#include "locklab/error.hpp"
#include "locklab/locking.hpp"

using namespace locklab;

namespace {

LockOptions unblended() {
  LockOptions o;
  o.blend = false;
  return o;
}

// Wrong key: the secret with bit `i` flipped.
BitVector flipped(const BitVector& k, std::size_t i) {
  BitVector w = k;
  w.flip(i);
  return w;
}

}  // namespace

TEST_SUITE("attacks") {

TEST_CASE("oracle answers by simulation and counts queries") {
  Circuit c = testutil::bench("c432");
  Oracle o(c);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    BitVector in = testutil::random_bits(c.num_inputs(), rng);
    CHECK(o.query(in) == simulate(c, in));
  }
  CHECK(o.queries() == 20);
  std::vector<std::uint64_t> words(c.num_inputs(), 0);
  o.query_words(words, 10);
  CHECK(o.queries() == 30);
  CHECK(o.input_names() == c.inputs());
}

TEST_CASE("SAT attack iteration counts on the toy") {
  Circuit toy = testutil::toy();
  struct Case {
    TechniqueKind kind;
    std::uint64_t iterations;
  };
  for (const Case cs : {Case{TechniqueKind::SarLock, 15}, Case{TechniqueKind::AntiSat, 16}, Case{TechniqueKind::Cac, 15}}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      CAPTURE(to_string(cs.kind));
      Rng rng(seed);
      Technique t;
      t.kind = cs.kind;
      t.n = 4;
      LockedDesign ld = lock(toy, t, rng);
      Oracle o(toy);
      AttackResult r = sat_attack(ld.circuit, ld.key_inputs, o, {}, &toy);
      REQUIRE(r.status == AttackStatus::KeyFound);
      CHECK(r.iterations == cs.iterations);
      CHECK(r.dip_trace.size() == r.iterations);
      CHECK(r.oracle_queries == r.iterations);
      REQUIRE(r.verified.has_value());
      CHECK(*r.verified);
      // Membership in the brute-force agreeing set.
      CHECK(corruption_exhaustive(ld.circuit, ld.key_inputs, *r.key, toy).differing == 0);
      // Every DIP really distinguishes: the oracle answer is what the original computes.
      for (const auto& d : r.dip_trace) CHECK(simulate(toy, d.input) == d.output);
    }
  }
}

TEST_CASE("SAT attack on larger designs returns a correct key") {
  Rng rng(4);
  for (const auto& name : {"c432", "c880"}) {
    Circuit c = testutil::bench(name);
    for (auto kind : {TechniqueKind::Rll, TechniqueKind::TtLock, TechniqueKind::Cac2}) {
      Technique t;
      t.kind = kind;
      t.n = kind == TechniqueKind::Rll ? 12 : 4;
      t.m = kind == TechniqueKind::Cac2 ? 2 : 0;
      LockedDesign ld = lock(c, t, rng);
      Oracle o(c);
      AttackResult r = sat_attack(ld.circuit, ld.key_inputs, o, {}, &c);
      REQUIRE(r.status == AttackStatus::KeyFound);
      CHECK(*r.verified);
    }
  }
}

TEST_CASE("SAT attack limits and interface errors") {
  Circuit c = testutil::bench("c432");
  Rng rng(5);
  LockedDesign ld = lock_sarlock(c, 8, rng);
  Oracle o(c);
  AttackLimits lim;
  lim.max_iterations = 3;
  AttackResult r = sat_attack(ld.circuit, ld.key_inputs, o, lim);
  CHECK(r.status == AttackStatus::Timeout);
  CHECK(r.iterations == 3);
  CHECK_FALSE(r.key.has_value());
  lim.max_iterations.reset();
  lim.seconds = 0.0;
  CHECK(sat_attack(ld.circuit, ld.key_inputs, o, lim).status == AttackStatus::Timeout);

  Oracle wrong(testutil::toy());
  CHECK_THROWS_AS(sat_attack(ld.circuit, ld.key_inputs, wrong), InterfaceError);
  CHECK_THROWS_AS(sat_attack(ld.circuit, {"nope"}, o), InterfaceError);

  // The oracle answer (1,1) at a=1 is reachable by no key.
  Circuit locked = parse_bench("INPUT(a)\nINPUT(k)\nOUTPUT(y)\nOUTPUT(z)\nnk = NOT(k)\ny = AND(a, k)\nz = AND(a, nk)\n");
  Circuit both = parse_bench("INPUT(a)\nOUTPUT(y)\nOUTPUT(z)\ny = BUFF(a)\nz = BUFF(a)\n");
  Oracle bad(both);
  AttackResult none = sat_attack(locked, {"k"}, bad);
  CHECK(none.status == AttackStatus::NoSolution);
  CHECK(none.iterations == 1);
}

TEST_CASE("brute force agreeing-key counts") {
  Circuit toy = testutil::toy();
  Rng rng(7);
  {
    LockedDesign ld = lock_sarlock(toy, 4, rng);
    Oracle o(toy);
    AttackResult r = brute_force_attack(ld.circuit, ld.key_inputs, o);
    CHECK(r.status == AttackStatus::ExactKeyFound);
    CHECK(*r.agreeing_keys == 1);
    CHECK(*r.key == ld.secret_key);
    CHECK(r.oracle_queries == 16);
  }
  {
    LockedDesign ld = lock_antisat(toy, 4, rng);
    Oracle o(toy);
    AttackResult r = brute_force_attack(ld.circuit, ld.key_inputs, o);
    CHECK(*r.agreeing_keys == 16);
    CHECK(r.key->slice(0, 4) == r.key->slice(4, 4));
  }
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    // On the XOR toy two key gates could cancel; c17 is all NAND.
    Circuit c17 = testutil::bench("c17");
    Rng seeded(seed);
    LockedDesign ld = lock_rll(c17, 2, seeded);
    Oracle o(c17);
    AttackResult r = brute_force_attack(ld.circuit, ld.key_inputs, o);
    CHECK(*r.agreeing_keys == 1);
    CHECK(*r.key == ld.secret_key);
  }
  Circuit c = testutil::bench("c432");
  LockedDesign big = lock_sarlock(c, 4, rng);
  Oracle o(c);
  CHECK_THROWS_AS(brute_force_attack(big.circuit, big.key_inputs, o), SizeGuardError);
}

TEST_CASE("corruption measurement") {
  Circuit toy = testutil::toy();
  Rng rng(8);
  LockedDesign cac = lock_cac(toy, 2, rng);
  CHECK(corruption_exhaustive(cac.circuit, cac.key_inputs, cac.secret_key, toy).differing == 0);
  for (std::size_t i = 0; i < 2; ++i) {
    auto s = corruption_exhaustive(cac.circuit, cac.key_inputs, flipped(cac.secret_key, i), toy);
    CHECK(s.differing == 4);
    CHECK(s.total == 16);
    CHECK(s.rate() == doctest::Approx(0.25));
  }
  LockedDesign tt = lock_ttlock(toy, 2, rng);
  CHECK(corruption_exhaustive(tt.circuit, tt.key_inputs, flipped(tt.secret_key, 0), toy).differing == 8);

  Circuit c = testutil::bench("c880");
  LockedDesign rll = lock_rll(c, 16, rng);
  auto sampled = corruption_sampled(rll.circuit, rll.key_inputs, flipped(rll.secret_key, 3), c, 1000, rng);
  CHECK(sampled.total == 1000);
  CHECK_FALSE(sampled.exhaustive);
  CHECK(sampled.differing <= 1000);
  CHECK(corruption_sampled(rll.circuit, rll.key_inputs, rll.secret_key, c, 1000, rng).differing == 0);
  CHECK_THROWS_AS(corruption_exhaustive(rll.circuit, rll.key_inputs, rll.secret_key, c), SizeGuardError);
  CHECK_THROWS_AS(corruption_exhaustive(rll.circuit, rll.key_inputs, BitVector(3), c), InterfaceError);
}

TEST_CASE("mapping probe recovers the comparator mapping before blending") {
  Circuit c = testutil::bench("c432");
  for (std::uint64_t seed : {1, 2, 3}) {
    Rng rng(seed);
    LockedDesign ld = lock_cac(c, 6, rng, unblended());
    MappingReport m = mapping_probe(ld.circuit, ld.key_inputs);
    CHECK(m.method == MappingMethod::Syntactic);
    CHECK(m.resolved == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(m.keys[i].candidates == std::vector<std::string>{ld.meta.protected_pis[i]});
    CHECK(m.ambiguity_exponent == doctest::Approx(6.0));
  }
}

TEST_CASE("mapping probe on CAC2 sees a decoy per protected input") {
  Circuit c = testutil::bench("c880");
  for (bool blend : {false, true}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      CAPTURE(blend);
      Rng rng(seed);
      LockOptions opt;
      opt.blend = blend;
      const std::size_t n = 4, m = 2;
      LockedDesign ld = lock_cac2(c, n, m, rng, opt);
      MappingReport r = mapping_probe(ld.circuit, ld.key_inputs);
      for (std::size_t i = 0; i < n + m; ++i) {
        const auto& cands = r.keys[i].candidates;
        const std::string& truth = i < n ? ld.meta.protected_pis[i] : ld.meta.protected_pis_2[i - n];
        CHECK(cands.size() >= 2);
        CHECK(std::find(cands.begin(), cands.end(), truth) != cands.end());
      }
      CHECK(r.ambiguity_exponent > n);
      CHECK(r.ambiguity_exponent <= 2 * n + 2 * m);
    }
  }
}

TEST_CASE("mapping probe after blending and on RLL") {
  Circuit c = testutil::bench("c432");
  Rng rng(10);
  LockedDesign ld = lock_cac(c, 5, rng);
  MappingReport m = mapping_probe(ld.circuit, ld.key_inputs);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& cands = m.keys[i].candidates;
    CHECK(std::find(cands.begin(), cands.end(), ld.meta.protected_pis[i]) != cands.end());
  }
  MappingOptions functional;
  functional.method = MappingMethod::Functional;
  MappingReport f = mapping_probe(ld.circuit, ld.key_inputs, functional);
  CHECK(f.method == MappingMethod::Functional);
  CHECK(f.resolved == 5);

  LockedDesign rll = lock_rll(c, 8, rng, unblended());
  MappingReport r = mapping_probe(rll.circuit, rll.key_inputs);
  CHECK(r.resolved == 0);
  CHECK(r.ambiguity_exponent == 0.0);
}

TEST_CASE("removal probe") {
  Circuit toy = testutil::toy();
  Rng rng(11);
  {
    LockedDesign ld = lock_sarlock(toy, 4, rng, unblended());
    RemovalReport r = removal_probe(ld.circuit, ld.key_inputs, toy);
    CHECK_FALSE(r.partial);
    bool flip_at_zero = false;
    for (const auto& cs : r.critical) flip_at_zero |= (cs.signal == ld.meta.flip_signal && !cs.value);
    CHECK(flip_at_zero);
  }
  {
    LockedDesign ld = lock_antisat(toy, 4, rng, unblended());
    RemovalReport r = removal_probe(ld.circuit, ld.key_inputs, toy);
    bool flip_at_zero = false;
    for (const auto& cs : r.critical) flip_at_zero |= (cs.signal == ld.meta.flip_signal && !cs.value);
    CHECK(flip_at_zero);
  }
  {
    LockedDesign ld = lock_ttlock(toy, 4, rng);
    CHECK(removal_probe(ld.circuit, ld.key_inputs, toy).critical.empty());
  }
  {
    LockOptions classic;
    classic.classic_cac = true;
    LockedDesign ld = lock_cac(toy, 4, rng, classic);
    CHECK(removal_probe(ld.circuit, ld.key_inputs, toy).critical.empty());
  }
  {
    // With the hardwired disjunct, pinning the key comparator low leaves the
    // corrupt and restore constants cancelling: that signal is critical.
    LockedDesign ld = lock_cac(toy, 4, rng, unblended());
    RemovalReport r = removal_probe(ld.circuit, ld.key_inputs, toy);
    CHECK_FALSE(r.critical.empty());
  }
  {
    Circuit c = testutil::bench("c432");
    LockedDesign ld = lock_cac2(c, 4, 2, rng);
    RemovalReport r = removal_probe(ld.circuit, ld.key_inputs, c);
    CHECK_FALSE(r.partial);
    CHECK(r.critical.empty());
    CHECK(r.scanned == r.candidates);
  }
  {
    Circuit c = testutil::bench("c880");
    LockedDesign ld = lock_sarlock(c, 6, rng);
    RemovalOptions opt;
    opt.seconds = 0.0;
    CHECK(removal_probe(ld.circuit, ld.key_inputs, c, opt).partial);
  }
}

TEST_CASE("DIP trace CSV and status names") {
  Circuit toy = testutil::toy();
  Rng rng(12);
  LockedDesign ld = lock_sarlock(toy, 2, rng);
  Oracle o(toy);
  AttackResult r = sat_attack(ld.circuit, ld.key_inputs, o);
  const std::string csv = dip_trace_csv(r);
  CHECK(csv.rfind("iteration,input_hex,output_hex\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(r.iterations + 1));
  for (auto s : {AttackStatus::KeyFound, AttackStatus::ExactKeyFound, AttackStatus::Timeout, AttackStatus::NoSolution}) {
    CHECK(attack_status_from_string(to_string(s)) == s);
  }
  CHECK(verify_key(ld.circuit, ld.key_inputs, ld.secret_key, toy).equivalent());
  CHECK_THROWS_AS(verify_key(ld.circuit, ld.key_inputs, BitVector(1), toy), InterfaceError);
}

}  // TEST_SUITE
