#include <doctest.h>

#include <regex>
#include <set>

#include "common.hpp"
#include "locklab/error.hpp"
#include "locklab/locking.hpp"
#include "locklab/sat.hpp"

using namespace locklab;

namespace {

// Word of pattern bits for input `i` when the 2^w patterns p = 0..2^w-1 are packed.
std::uint64_t enum_word(std::size_t i, std::size_t w) {
  std::uint64_t word = 0;
  for (std::uint64_t p = 0; p < (1ull << w); ++p) {
    if ((p >> i) & 1) word |= 1ull << p;
  }
  return word;
}

// Full signal words of `c` with non-key inputs enumerated exhaustively (at most 6)
// and key inputs pinned to `key`.
std::vector<std::uint64_t> run_exhaustive(const Circuit& c, const std::vector<std::string>& keys, const BitVector& key) {
  const std::size_t w = c.num_inputs() - keys.size();
  REQUIRE(w <= 6);
  std::vector<std::uint64_t> words(c.num_inputs());
  std::size_t data = 0;
  for (SignalId i = 0; i < c.num_inputs(); ++i) {
    auto it = std::find(keys.begin(), keys.end(), c.name(i));
    if (it != keys.end()) {
      words[i] = key[static_cast<std::size_t>(it - keys.begin())] ? ~0ull : 0;
    } else {
      words[i] = enum_word(data++, w);
    }
  }
  return simulate_words(c, words);
}

// Number of exhaustive patterns on which some output of the locked design under
// `key` differs from `original`.
int corrupted_patterns(const Circuit& original, const LockedDesign& ld, const BitVector& key) {
  const std::size_t w = original.num_inputs();
  const auto ref = run_exhaustive(original, {}, BitVector(0));
  const auto got = run_exhaustive(ld.circuit, ld.key_inputs, key);
  std::uint64_t diff = 0;
  for (const auto& po : original.outputs()) diff |= ref[original.id(po)] ^ got[ld.circuit.id(po)];
  if (w < 6) diff &= (1ull << (1ull << w)) - 1;
  return __builtin_popcountll(diff);
}

BitVector key_from_index(std::uint64_t v, std::size_t width) {
  BitVector b(width);
  for (std::size_t i = 0; i < width; ++i) b.set(i, (v >> i) & 1);
  return b;
}

bool unlocks(const Circuit& original, const LockedDesign& ld, const BitVector& key) {
  return check_equivalence(original, ld.circuit, KeyBinding{ld.key_inputs, key}).equivalent();
}

Technique tech(TechniqueKind kind, std::size_t n, std::size_t m = 0) {
  Technique t;
  t.kind = kind;
  t.n = n;
  t.m = m;
  return t;
}

const TechniqueKind kAll[] = {TechniqueKind::Rll,  TechniqueKind::AntiSat,   TechniqueKind::SarLock, TechniqueKind::TtLock,
                              TechniqueKind::Cac, TechniqueKind::DoubleCac, TechniqueKind::Cac2};

bool two_locks(TechniqueKind k) { return k == TechniqueKind::DoubleCac || k == TechniqueKind::Cac2; }

}  // namespace

TEST_SUITE("locking") {

TEST_CASE("key count arithmetic") {
  for (std::size_t n = 2; n <= 12; ++n) {
    CHECK(tech(TechniqueKind::SarLock, n).key_count() == n);
    CHECK(tech(TechniqueKind::AntiSat, n).key_count() == 2 * n);
    CHECK(tech(TechniqueKind::TtLock, n).key_count() == n);
    CHECK(tech(TechniqueKind::Cac, n).key_count() == n);
    for (std::size_t m = 1; m <= n; ++m) CHECK(tech(TechniqueKind::Cac2, n, m).key_count() == 2 * (n + m));
  }
  CHECK(tech(TechniqueKind::Cac2, 32, 16).key_count() == 96);
  CHECK_THROWS_AS(tech(TechniqueKind::Cac2, 4, 5).validate(), Error);
  CHECK_THROWS_AS(tech(TechniqueKind::Cac2, 4, 0).validate(), Error);
  CHECK_THROWS_AS(tech(TechniqueKind::SarLock, 4, 2).validate(), Error);
  CHECK_THROWS_AS(tech(TechniqueKind::SarLock, 0).validate(), Error);
  CHECK(technique_from_string("CAC2") == TechniqueKind::Cac2);
  CHECK_FALSE(technique_from_string("xor").has_value());
}

TEST_CASE("locked designs carry the scheduled key inputs") {
  Circuit c = testutil::bench("c880");
  Rng rng(11);
  for (auto kind : kAll) {
    for (std::size_t n : {3, 6}) {
      Technique t = tech(kind, n, two_locks(kind) ? n / 2 : 0);
      LockedDesign ld = lock(c, t, rng);
      CAPTURE(to_string(kind));
      REQUIRE(ld.key_inputs.size() == t.key_count());
      CHECK(ld.secret_key.width() == t.key_count());
      for (std::size_t i = 0; i < ld.key_inputs.size(); ++i) {
        CHECK(ld.key_inputs[i] == "keyinput" + std::to_string(i));
        CHECK(ld.circuit.is_input(ld.circuit.id(ld.key_inputs[i])));
      }
      CHECK(ld.circuit.outputs() == c.outputs());
      // Original PIs come first, in order.
      for (std::size_t i = 0; i < c.num_inputs(); ++i) CHECK(ld.circuit.inputs()[i] == c.inputs()[i]);
    }
  }
}

TEST_CASE("secret key restores the original function") {
  Rng rng(5);
  for (const auto& name : {"c432", "c880", "c1908"}) {
    Circuit c = testutil::bench(name);
    for (auto kind : kAll) {
      CAPTURE(name);
      CAPTURE(to_string(kind));
      LockedDesign ld = lock(c, tech(kind, 8, two_locks(kind) ? 4 : 0), rng);
      CHECK(unlocks(c, ld, ld.secret_key));
      // A key differing in one random bit must not unlock (Anti-SAT excepted:
      // its correct keys form a class).
      if (kind != TechniqueKind::AntiSat) {
        BitVector wrong = ld.secret_key;
        const std::size_t bit = rng.below(wrong.width());
        wrong.set(bit, !wrong[bit]);
        CHECK_FALSE(unlocks(c, ld, wrong));
      }
    }
  }
}

TEST_CASE("unblended and classic variants are equivalent under the secret key") {
  Circuit c = testutil::bench("c432");
  Rng rng(21);
  LockOptions raw;
  raw.blend = false;
  for (auto kind : {TechniqueKind::Cac, TechniqueKind::DoubleCac, TechniqueKind::Cac2}) {
    LockedDesign a = lock(c, tech(kind, 6, kind == TechniqueKind::Cac ? 0 : 3), rng, raw);
    CHECK_FALSE(a.meta.blended);
    CHECK(unlocks(c, a, a.secret_key));
    Technique t = tech(kind, 6, kind == TechniqueKind::Cac ? 0 : 3);
    t.classic = true;
    LockedDesign b = lock(c, t, rng);
    CHECK(b.technique.classic);
    CHECK(unlocks(c, b, b.secret_key));
  }
  Technique layered = tech(TechniqueKind::SarLock, 5);
  layered.rll_bits = 4;
  LockedDesign l = lock(c, layered, rng);
  CHECK(l.key_inputs.size() == 9);
  CHECK(unlocks(c, l, l.secret_key));
}

TEST_CASE("exhaustive corruption per wrong key on a toy") {
  Circuit six = testutil::bench("../tests/data/toy6");
  struct Case {
    TechniqueKind kind;
    std::size_t n;
    bool classic;
    int per_wrong_key;
  };
  const Case cases[] = {
      {TechniqueKind::SarLock, 6, false, 1}, {TechniqueKind::Cac, 6, false, 1}, {TechniqueKind::AntiSat, 6, false, 1},
      {TechniqueKind::TtLock, 6, false, 2},  {TechniqueKind::Cac, 6, true, 2},  {TechniqueKind::SarLock, 3, false, 1},
      {TechniqueKind::Cac, 4, false, 1},     {TechniqueKind::TtLock, 4, false, 2},
  };
  for (std::uint64_t seed : {1, 2, 3}) {
    for (const auto& cs : cases) {
      CAPTURE(to_string(cs.kind));
      CAPTURE(cs.classic);
      CAPTURE(cs.n);
      Rng rng(seed);
      Technique t = tech(cs.kind, cs.n);
      t.classic = cs.classic;
      LockedDesign ld = lock(six, t, rng);
      const std::size_t k = ld.key_inputs.size();
      REQUIRE(k <= 12);
      int wrong = 0, correct = 0;
      for (std::uint64_t v = 0; v < (1ull << k); ++v) {
        const int d = corrupted_patterns(six, ld, key_from_index(v, k));
        if (d == 0) {
          ++correct;
        } else {
          ++wrong;
          // Inputs outside the protected set multiply every count.
          CHECK(d == cs.per_wrong_key << (6 - cs.n));
        }
      }
      CHECK(corrupted_patterns(six, ld, ld.secret_key) == 0);
      // Anti-SAT accepts every key with equal halves; the others have one correct key.
      CHECK(correct == (cs.kind == TechniqueKind::AntiSat ? (1 << cs.n) : 1));
      CHECK(wrong > 0);
    }
  }
}

TEST_CASE("second lock flips its node on 2^(n-m) patterns of the first lock's inputs") {
  Circuit c = testutil::bench("c432");
  for (std::uint64_t seed : {1, 2, 3}) {
    Rng rng(seed);
    LockedDesign ld = lock(c, tech(TechniqueKind::Cac2, 6, 3), rng);
    const auto& m = ld.meta;
    REQUIRE(m.blended);
    REQUIRE(m.protected_pis.size() == 6);
    REQUIRE(m.protected_pis_2.size() == 3);
    for (const auto& p : m.protected_pis_2) {
      CHECK(std::find(m.protected_pis.begin(), m.protected_pis.end(), p) != m.protected_pis.end());
    }
    REQUIRE_FALSE(m.target_node_2.empty());
    REQUIRE_FALSE(m.locked_node_2.empty());
    const SignalId target = ld.circuit.id(m.target_node_2);
    const SignalId locked = ld.circuit.id(m.locked_node_2);

    // Key order is K1 | K2 | OK1 | OK2.
    for (int trial = 0; trial < 4; ++trial) {
      BitVector key = ld.secret_key;
      BitVector k2;
      do {
        k2 = testutil::random_bits(3, rng);
      } while (k2 == m.pattern_2);
      for (std::size_t i = 0; i < 3; ++i) key.set(6 + i, k2[i]);

      Rng fill(seed * 100 + trial);
      int flips = 0;
      for (std::uint64_t p = 0; p < 64; ++p) {
        Assignment in;
        for (const auto& pi : ld.circuit.inputs()) in[pi] = fill.coin();
        for (std::size_t i = 0; i < 6; ++i) in[m.protected_pis[i]] = (p >> i) & 1;
        for (std::size_t i = 0; i < key.width(); ++i) in[ld.key_inputs[i]] = key[i];
        std::vector<std::uint64_t> words;
        for (const auto& pi : ld.circuit.inputs()) words.push_back(in.at(pi) ? 1 : 0);
        auto sig = simulate_words(ld.circuit, words);
        if ((sig[target] ^ sig[locked]) & 1) ++flips;
      }
      CHECK(flips == 8);
    }
    // With every key correct the node is never flipped.
    std::vector<std::uint64_t> words;
    Rng fill(seed);
    for (SignalId i = 0; i < ld.circuit.num_inputs(); ++i) words.push_back(fill.next());
    for (std::size_t i = 0; i < ld.key_inputs.size(); ++i) {
      words[ld.circuit.id(ld.key_inputs[i])] = ld.secret_key[i] ? ~0ull : 0;
    }
    auto sig = simulate_words(ld.circuit, words);
    CHECK(sig[target] == sig[locked]);
  }
}

TEST_CASE("decoys avoid the protected inputs") {
  Circuit c = testutil::bench("c880");
  Rng rng(4);
  LockedDesign ld = lock_cac2(c, 6, 3, rng);
  std::set<std::string> ppi(ld.meta.protected_pis.begin(), ld.meta.protected_pis.end());
  const Cone cone = fanin_cone(c, ld.meta.target_po);
  for (const auto* decoys : {&ld.meta.decoys_1, &ld.meta.decoys_2}) {
    CHECK(decoys->size() == (decoys == &ld.meta.decoys_1 ? 6u : 3u));
    for (const auto& d : *decoys) {
      CHECK_FALSE(ppi.count(d));
      CHECK(std::find(cone.inputs.begin(), cone.inputs.end(), d) != cone.inputs.end());
    }
  }
  CHECK(ld.meta.obf_keys.size() == 9);
  CHECK(ld.meta.relock_attempts >= 1);
  CHECK(ld.meta.relock_attempts <= 8);
}

TEST_CASE("no structural hints in names") {
  Circuit c = testutil::bench("c880");
  Rng rng(9);
  const std::regex banned("(corrupt|restore|cmp).*", std::regex::icase);
  for (auto kind : kAll) {
    for (bool blend : {false, true}) {
      LockOptions opt;
      opt.blend = blend;
      LockedDesign ld = lock(c, tech(kind, 6, two_locks(kind) ? 3 : 0), rng, opt);
      for (const auto& g : ld.circuit.gates()) CHECK_FALSE(std::regex_match(g.name, banned));
      if (blend) {
        // Every non-PO gate name is generic.
        const std::regex generic("g[0-9]+");
        for (const auto& g : ld.circuit.gates()) {
          if (!ld.circuit.is_output(ld.circuit.id(g.name))) CHECK(std::regex_match(g.name, generic));
        }
      }
    }
  }
}

TEST_CASE("same seed, same design") {
  Circuit c = testutil::bench("c432");
  for (auto kind : kAll) {
    Rng a(77), b(77);
    const Technique t = tech(kind, 5, two_locks(kind) ? 2 : 0);
    LockedDesign x = lock(c, t, a), y = lock(c, t, b);
    CHECK(x.circuit == y.circuit);
    CHECK(x.secret_key == y.secret_key);
  }
}

TEST_CASE("infeasible requests report the largest feasible size") {
  Circuit c17 = testutil::bench("c17");
  Rng rng(1);
  try {
    lock_cac(c17, 9, rng);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.max_available() == 4);
  }
  CHECK_THROWS_AS(lock_cac2(c17, 3, 1, rng), InfeasibleError);
  CHECK_THROWS_AS(lock_rll(c17, 50, rng), InfeasibleError);
  LockedDesign blended = lock_double_cac(testutil::bench("c432"), 4, 2, rng);
  CHECK_THROWS_AS(obfuscate_ppi(blended, testutil::bench("c432"), 1, rng), Error);
  CHECK_THROWS_AS(apply_key(blended, BitVector(2)), InterfaceError);
}

TEST_CASE("CAC at an internal node") {
  Circuit c = testutil::bench("c432");
  Rng rng(12);
  auto counts = cone_input_counts(c);
  std::string node;
  for (const auto& g : c.gates()) {
    const SignalId s = c.id(g.name);
    if (!c.is_output(s) && counts[s] >= 6) {
      node = g.name;
      break;
    }
  }
  REQUIRE_FALSE(node.empty());
  LockedDesign ld = lock_cac(c, 6, rng, {}, node);
  CHECK(unlocks(c, ld, ld.secret_key));
  CHECK(ld.meta.relock_attempts >= 1);
  CHECK_THROWS_AS(lock_cac(c, 6, rng, {}, std::string("nope")), NetlistError);
}

TEST_CASE("apply_key ties keys to constants") {
  Circuit toy = testutil::toy();
  Rng rng(2);
  LockedDesign ld = lock_sarlock(toy, 4, rng);
  Circuit fixed = apply_key(ld, ld.secret_key);
  CHECK(fixed.inputs() == toy.inputs());
  CHECK(check_equivalence(toy, fixed).equivalent());
  Circuit back = parse_bench(write_bench(fixed));
  CHECK(check_equivalence(toy, back).equivalent());
}

TEST_CASE("key file round trip and errors") {
  Circuit c = testutil::bench("c432");
  Rng rng(3);
  LockedDesign ld = lock_cac2(c, 4, 2, rng);
  const std::string text = write_keyfile(ld, {{"seed", "3"}});
  KeyFile kf = read_keyfile(text);
  CHECK(kf.names == ld.key_inputs);
  CHECK(kf.bits == ld.secret_key);
  CHECK_NOTHROW(check_keyfile(kf, ld.key_inputs));
  CHECK(write_keyfile(kf) == text);
  bool saw_seed = false;
  for (const auto& [k, v] : kf.metadata) saw_seed |= (k == "seed" && v == "3");
  CHECK(saw_seed);

  CHECK_THROWS_AS(read_keyfile("keyinput0=2\n"), KeyFileError);
  CHECK_THROWS_AS(read_keyfile("keyinput0\n"), KeyFileError);
  CHECK_THROWS_AS(read_keyfile("# keys=3\nkeyinput0=1\n"), KeyFileError);
  try {
    read_keyfile("keyinput0=1\n\nbad line\n");
    FAIL("expected KeyFileError");
  } catch (const KeyFileError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  KeyFile swapped = kf;
  std::swap(swapped.names[0], swapped.names[1]);
  CHECK_THROWS_AS(check_keyfile(swapped, ld.key_inputs), KeyFileError);
  swapped.names.pop_back();
  CHECK_THROWS_AS(check_keyfile(swapped, ld.key_inputs), KeyFileError);
}

}  // TEST_SUITE
