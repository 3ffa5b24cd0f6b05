#include <algorithm>
#include <set>

#include "locklab/blend.hpp"
#include "locklab/error.hpp"
#include "locklab/locking.hpp"
#include "locklab/sat.hpp"

namespace locklab {
namespace {

BitVector random_bits(std::size_t width, Rng& rng) {
  BitVector v(width);
  for (std::size_t i = 0; i < width; ++i) v.set(i, rng.coin());
  return v;
}

// Appends `count` key inputs named keyinput<i>, continuing the design's numbering.
std::vector<std::string> add_keys(CircuitBuilder& b, LockedDesign& ld, std::size_t count) {
  std::vector<std::string> names;
  std::size_t index = ld.key_inputs.size();
  while (names.size() < count) {
    std::string name = "keyinput" + std::to_string(index++);
    if (b.has(name)) continue;
    b.add_input(name);
    names.push_back(name);
    ld.key_inputs.push_back(name);
  }
  return names;
}

void append_secret(LockedDesign& ld, const BitVector& bits) { ld.secret_key = ld.secret_key.concat(bits); }

LockedDesign start(const Circuit& c, TechniqueKind kind, std::size_t n, std::size_t m) {
  LockedDesign ld;
  ld.circuit = c;
  ld.technique.kind = kind;
  ld.technique.n = n;
  ld.technique.m = m;
  return ld;
}

// True when forcing `restore` to 0 leaves a circuit that still differs from
// `original` under the rest of the secret key.
bool corruption_observable(const CircuitBuilder& b, const std::string& restore, const Circuit& original,
                           const LockedDesign& ld) {
  CircuitBuilder fsc = b;
  fsc.make_constant(restore, false);
  auto r = check_equivalence(original, fsc.build(), KeyBinding{ld.key_inputs, ld.secret_key});
  return r.status != SatStatus::Unsat;
}

struct CacLock {
  std::string carrier;  // signal now holding the restored value of the target
  std::string restore;
  BitVector pattern;
  std::vector<std::vector<std::string>> taps;
};

// One corrupt-and-correct unit at `target` over `ppi` with key inputs `keys`.
CacLock add_cac(CircuitBuilder& b, const std::string& target, const std::vector<std::string>& ppi,
                const std::vector<std::string>& keys, const BitVector& pattern, bool classic) {
  CacLock lock;
  lock.pattern = pattern;
  const Comparator corrupt = build_comparator(b, ppi, pattern);
  const std::string corrupted = splice_xor(b, target, corrupt.output, b.fresh_name());
  const Comparator keyed = build_comparator(b, ppi, keys);
  lock.taps = keyed.taps;
  lock.restore = keyed.output;
  if (!classic) {
    // Separate hardwired instance on the restore side.
    const Comparator hard = build_comparator(b, ppi, pattern);
    for (std::size_t i = 0; i < ppi.size(); ++i) {
      lock.taps[i].insert(lock.taps[i].end(), hard.taps[i].begin(), hard.taps[i].end());
    }
    lock.restore = b.add_gate(GateKind::Or, {keyed.output, hard.output});
  }
  lock.carrier = splice_xor(b, corrupted, lock.restore, b.fresh_name());
  return lock;
}

constexpr int kMaxRelock = 8;

LockedDesign sarlock_like(const Circuit& c, std::size_t n, Rng& rng, TechniqueKind kind) {
  if (n < 1) throw Error("n must be at least 1");
  LockedDesign ld = start(c, kind, n, 0);
  const std::string po = select_target(c, n, rng);
  std::vector<std::string> x = rng.sample(fanin_cone(c, po).inputs, n);
  CircuitBuilder b(c);
  ld.meta.target_po = po;
  ld.meta.protected_pis = x;
  if (kind == TechniqueKind::AntiSat) {
    const auto ka = add_keys(b, ld, n);
    const auto kb = add_keys(b, ld, n);
    std::vector<std::string> ga, gb;
    for (std::size_t i = 0; i < n; ++i) {
      ga.push_back(b.add_gate(GateKind::Xor, {x[i], ka[i]}));
      gb.push_back(b.add_gate(GateKind::Xor, {x[i], kb[i]}));
    }
    auto tree = [&](std::vector<std::string> level) {
      while (level.size() > 1) {
        std::vector<std::string> next;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(b.add_gate(GateKind::And, {level[i], level[i + 1]}));
        if (level.size() % 2) next.push_back(level.back());
        level = std::move(next);
      }
      return level.front();
    };
    const std::string g = tree(ga);
    const std::string h = tree(gb);
    const std::string nh = b.add_gate(GateKind::Not, {h});
    const std::string flip = b.add_gate(GateKind::And, {g, nh});
    splice_xor(b, po, flip, b.fresh_name());
    const BitVector r = random_bits(n, rng);
    append_secret(ld, r);
    append_secret(ld, r);
    ld.meta.keys_1 = ka;
    ld.meta.keys_2 = kb;
    ld.meta.flip_signal = flip;
    ld.meta.pattern_1 = r;
  } else {
    const auto k = add_keys(b, ld, n);
    const BitVector sk = random_bits(n, rng);
    const Comparator input_cmp = build_comparator(b, x, k);
    const Comparator mask = build_comparator(b, k, sk);
    const std::string nmask = b.add_gate(GateKind::Not, {mask.output});
    const std::string flip = b.add_gate(GateKind::And, {input_cmp.output, nmask});
    splice_xor(b, po, flip, b.fresh_name());
    append_secret(ld, sk);
    ld.meta.keys_1 = k;
    ld.meta.flip_signal = flip;
    ld.meta.pattern_1 = sk;
  }
  ld.circuit = b.build();
  return ld;
}

void add_rll(LockedDesign& ld, std::size_t bits, Rng& rng) {
  const Circuit& c = ld.circuit;
  auto counts = cone_input_counts(c);
  std::vector<std::string> wires;
  for (SignalId s : c.topo()) {
    // A wire that is a literal of a single input would read as a comparator.
    if (counts[s] >= 2) wires.push_back(c.name(s));
  }
  if (wires.size() < bits) {
    throw InfeasibleError("circuit has " + std::to_string(wires.size()) + " lockable wires, " +
                              std::to_string(bits) + " requested",
                          wires.size());
  }
  const auto chosen = rng.sample(wires, bits);
  CircuitBuilder b(c);
  const auto k = add_keys(b, ld, bits);
  BitVector secret(bits);
  for (std::size_t i = 0; i < bits; ++i) {
    const bool xnor = rng.coin();
    splice_xor(b, chosen[i], k[i], b.fresh_name(), xnor ? GateKind::Xnor : GateKind::Xor);
    secret.set(i, xnor);
  }
  append_secret(ld, secret);
  ld.circuit = b.build();
}

LockOptions without_blend(LockOptions opt) {
  opt.blend = false;
  return opt;
}

// Double CAC before blending. `min_po_cone` is n for Double CAC and 2n when the
// result is to be obfuscated.
LockedDesign double_cac_core(const Circuit& c, std::size_t n, std::size_t m, std::size_t min_po_cone, Rng& rng,
                             const LockOptions& opt, TechniqueKind kind) {
  if (n < 1 || m < 1 || m > n) throw Error("Double CAC needs 1 <= m <= n");
  LockedDesign ld = start(c, kind, n, m);
  ld.technique.classic = opt.classic_cac;
  // Eligible outputs: wide enough, with an internal node wide enough for lock 2.
  auto counts = cone_input_counts(c);
  std::vector<std::string> pos;
  std::vector<std::vector<std::string>> pos_nodes;
  std::size_t best = 0;
  for (SignalId po_id : c.output_ids()) {
    if (c.is_input(po_id) || counts[po_id] < min_po_cone) continue;
    std::vector<std::string> nodes;
    for (const auto& g : fanin_cone(c, c.name(po_id)).gates) {
      const SignalId s = c.id(g);
      if (c.is_output(s)) continue;
      best = std::max(best, counts[s]);
      if (counts[s] >= n) nodes.push_back(g);
    }
    if (nodes.empty()) continue;
    pos.push_back(c.name(po_id));
    pos_nodes.push_back(std::move(nodes));
  }
  if (pos.empty()) {
    std::size_t widest = 0;
    for (SignalId po_id : c.output_ids()) widest = std::max(widest, counts[po_id]);
    if (widest < min_po_cone) {
      throw InfeasibleError("no primary output has a cone with " + std::to_string(min_po_cone) +
                                " primary inputs (max " + std::to_string(widest) + ")",
                            widest);
    }
    throw InfeasibleError("no internal node has " + std::to_string(n) + " primary inputs in its cone (max " +
                              std::to_string(best) + ")",
                          best);
  }
  const std::size_t pick = rng.below(pos.size());
  const std::string po = pos[pick];
  const std::vector<std::string> nodes = pos_nodes[pick];

  CircuitBuilder base(c);
  const auto k1 = add_keys(base, ld, n);
  const auto k2 = add_keys(base, ld, m);
  const LockedDesign keys_only = ld;
  const CircuitBuilder keyed_base = base;

  std::string node;
  std::vector<std::string> ppi1, ppi2;
  CacLock first, second;
  CircuitBuilder b;
  for (int attempt = 1; attempt <= kMaxRelock; ++attempt) {
    ld = keys_only;
    b = keyed_base;
    node = nodes[rng.below(nodes.size())];
    ppi1 = rng.sample(fanin_cone(c, node).inputs, n);
    ppi2 = rng.sample(ppi1, m);
    first = add_cac(b, po, ppi1, k1, random_bits(n, rng), opt.classic_cac);
    second = add_cac(b, node, ppi2, k2, random_bits(m, rng), opt.classic_cac);
    ld.secret_key = first.pattern.concat(second.pattern);
    ld.meta.relock_attempts = static_cast<std::size_t>(attempt);
    if (corruption_observable(b, second.restore, c, ld)) break;
  }
  ld.meta.target_po = po;
  ld.meta.target_node_2 = node;
  ld.meta.locked_node_2 = second.carrier;
  ld.meta.protected_pis = ppi1;
  ld.meta.protected_pis_2 = ppi2;
  ld.meta.keys_1 = k1;
  ld.meta.keys_2 = k2;
  ld.meta.pattern_1 = first.pattern;
  ld.meta.pattern_2 = second.pattern;
  ld.meta.restore_1 = first.restore;
  ld.meta.restore_2 = second.restore;
  ld.meta.restore_taps_1 = first.taps;
  ld.meta.restore_taps_2 = second.taps;
  ld.circuit = b.build();
  return ld;
}

std::string renamed(const BlendResult& r, const std::string& name) {
  if (name.empty()) return name;
  auto it = r.renamed.find(name);
  return it == r.renamed.end() ? std::string() : it->second;
}

}  // namespace

void finalize_design(LockedDesign& ld, Rng& rng, const LockOptions& opt) {
  if (!opt.blend) return;
  BlendResult r = structural_blend(ld.circuit, rng, opt.blend_rounds);
  ld.circuit = std::move(r.circuit);
  ld.meta.target_node_2 = renamed(r, ld.meta.target_node_2);
  ld.meta.locked_node_2 = renamed(r, ld.meta.locked_node_2);
  ld.meta.flip_signal = renamed(r, ld.meta.flip_signal);
  ld.meta.restore_1 = renamed(r, ld.meta.restore_1);
  ld.meta.restore_2 = renamed(r, ld.meta.restore_2);
  ld.meta.restore_taps_1.clear();
  ld.meta.restore_taps_2.clear();
  ld.meta.blended = true;
}

LockedDesign lock_rll(const Circuit& c, std::size_t bits, Rng& rng, const LockOptions& opt) {
  if (bits < 1) throw Error("RLL needs at least one key bit");
  LockedDesign ld = start(c, TechniqueKind::Rll, bits, 0);
  add_rll(ld, bits, rng);
  finalize_design(ld, rng, opt);
  return ld;
}

LockedDesign lock_antisat(const Circuit& c, std::size_t n, Rng& rng, const LockOptions& opt) {
  LockedDesign ld = sarlock_like(c, n, rng, TechniqueKind::AntiSat);
  finalize_design(ld, rng, opt);
  return ld;
}

LockedDesign lock_sarlock(const Circuit& c, std::size_t n, Rng& rng, const LockOptions& opt) {
  LockedDesign ld = sarlock_like(c, n, rng, TechniqueKind::SarLock);
  finalize_design(ld, rng, opt);
  return ld;
}

LockedDesign lock_ttlock(const Circuit& c, std::size_t n, Rng& rng, const LockOptions& opt) {
  if (n < 1) throw Error("n must be at least 1");
  LockedDesign ld = start(c, TechniqueKind::TtLock, n, 0);
  const std::string po = select_target(c, n, rng);
  const auto ppi = rng.sample(fanin_cone(c, po).inputs, n);
  CircuitBuilder b(c);
  const auto k = add_keys(b, ld, n);
  const BitVector sk = random_bits(n, rng);
  const Comparator corrupt = build_comparator(b, ppi, sk);
  const std::string corrupted = splice_xor(b, po, corrupt.output, b.fresh_name());
  const Comparator restore = build_comparator(b, ppi, k);
  splice_xor(b, corrupted, restore.output, b.fresh_name());
  append_secret(ld, sk);
  ld.meta.target_po = po;
  ld.meta.protected_pis = ppi;
  ld.meta.keys_1 = k;
  ld.meta.pattern_1 = sk;
  ld.meta.restore_1 = restore.output;
  ld.meta.restore_taps_1 = restore.taps;
  ld.circuit = b.build();
  finalize_design(ld, rng, opt);
  return ld;
}

LockedDesign lock_cac(const Circuit& c, std::size_t n, Rng& rng, const LockOptions& opt,
                      const std::optional<std::string>& target) {
  if (n < 1) throw Error("n must be at least 1");
  LockedDesign ld = start(c, TechniqueKind::Cac, n, 0);
  ld.technique.classic = opt.classic_cac;
  std::string node;
  if (target) {
    if (!c.has(*target)) throw NetlistError("unknown target node " + *target);
    const std::size_t have = fanin_cone(c, *target).inputs.size();
    if (have < n) {
      throw InfeasibleError("target " + *target + " has " + std::to_string(have) + " primary inputs in its cone (max n " +
                                std::to_string(have) + ")",
                            have);
    }
    node = *target;
  } else {
    node = select_target(c, n, rng);
  }
  const auto ppi = rng.sample(fanin_cone(c, node).inputs, n);
  CircuitBuilder base(c);
  const auto k = add_keys(base, ld, n);
  const LockedDesign keys_only = ld;
  const bool at_output = c.is_output(c.id(node));
  CircuitBuilder b;
  CacLock lock;
  for (int attempt = 1; attempt <= kMaxRelock; ++attempt) {
    ld = keys_only;
    b = base;
    lock = add_cac(b, node, ppi, k, random_bits(n, rng), opt.classic_cac);
    ld.secret_key = lock.pattern;
    ld.meta.relock_attempts = static_cast<std::size_t>(attempt);
    // A PO target always shows the corruption; internal nodes may mask it.
    if (at_output || corruption_observable(b, lock.restore, c, ld)) break;
  }
  ld.meta.target_po = at_output ? node : std::string();
  ld.meta.target_node_2 = at_output ? std::string() : node;
  ld.meta.protected_pis = ppi;
  ld.meta.keys_1 = k;
  ld.meta.pattern_1 = lock.pattern;
  ld.meta.restore_1 = lock.restore;
  ld.meta.restore_taps_1 = lock.taps;
  ld.circuit = b.build();
  finalize_design(ld, rng, opt);
  return ld;
}

LockedDesign lock_double_cac(const Circuit& c, std::size_t n, std::size_t m, Rng& rng, const LockOptions& opt) {
  LockedDesign ld = double_cac_core(c, n, m, n, rng, opt, TechniqueKind::DoubleCac);
  finalize_design(ld, rng, opt);
  return ld;
}

LockedDesign obfuscate_ppi(const LockedDesign& in, const Circuit& original, int which, Rng& rng,
                           const LockOptions& opt) {
  if (which != 1 && which != 2) throw Error("obfuscate_ppi: lock index must be 1 or 2");
  if (in.meta.blended) throw Error("obfuscate_ppi needs an unblended design");
  LockedDesign ld = in;
  const auto& ppi = which == 1 ? ld.meta.protected_pis : ld.meta.protected_pis_2;
  const auto& taps = which == 1 ? ld.meta.restore_taps_1 : ld.meta.restore_taps_2;
  if (ppi.empty() || taps.size() != ppi.size()) throw Error("obfuscate_ppi: lock " + std::to_string(which) + " is absent");

  // Decoys come from the protected output's cone and avoid every protected input.
  const std::string& anchor = ld.meta.target_po.empty() ? ld.meta.target_node_2 : ld.meta.target_po;
  std::set<std::string> avoid(ld.meta.protected_pis.begin(), ld.meta.protected_pis.end());
  avoid.insert(ld.meta.protected_pis_2.begin(), ld.meta.protected_pis_2.end());
  std::vector<std::string> pool;
  for (const auto& pi : fanin_cone(original, anchor).inputs) {
    if (!avoid.count(pi)) pool.push_back(pi);
  }
  if (pool.size() < ppi.size()) {
    throw InfeasibleError("only " + std::to_string(pool.size()) + " decoy inputs available for " +
                              std::to_string(ppi.size()) + " protected inputs",
                          pool.size());
  }
  const auto decoys = rng.sample(pool, ppi.size());

  CircuitBuilder b(ld.circuit);
  const auto ok = add_keys(b, ld, ppi.size());
  BitVector select(ppi.size());
  for (std::size_t i = 0; i < ppi.size(); ++i) {
    const bool sel = rng.coin();
    select.set(i, sel);
    // The secret select value routes the protected input through.
    const std::string& on_one = sel ? ppi[i] : decoys[i];
    const std::string& on_zero = sel ? decoys[i] : ppi[i];
    const std::string nok = b.add_gate(GateKind::Not, {ok[i]});
    const std::string hi = b.add_gate(GateKind::And, {ok[i], on_one});
    const std::string lo = b.add_gate(GateKind::And, {nok, on_zero});
    const std::string opi = b.add_gate(GateKind::Or, {hi, lo});
    for (const auto& tap : taps[i]) b.replace_fanin(tap, ppi[i], opi);
  }
  append_secret(ld, select);
  (which == 1 ? ld.meta.decoys_1 : ld.meta.decoys_2) = decoys;
  ld.meta.obf_keys.insert(ld.meta.obf_keys.end(), ok.begin(), ok.end());
  ld.circuit = b.build();
  finalize_design(ld, rng, opt);
  return ld;
}

LockedDesign lock_cac2(const Circuit& c, std::size_t n, std::size_t m, Rng& rng, const LockOptions& opt) {
  const LockOptions raw = without_blend(opt);
  LockedDesign ld = double_cac_core(c, n, m, 2 * n, rng, opt, TechniqueKind::Cac2);
  ld = obfuscate_ppi(ld, c, 1, rng, raw);
  ld = obfuscate_ppi(ld, c, 2, rng, raw);
  ld.technique.kind = TechniqueKind::Cac2;
  finalize_design(ld, rng, opt);
  return ld;
}

LockedDesign lock(const Circuit& c, const Technique& t, Rng& rng, const LockOptions& options) {
  t.validate();
  LockOptions opt = options;
  opt.classic_cac = opt.classic_cac || t.classic;
  const LockOptions raw = without_blend(opt);
  LockedDesign ld;
  switch (t.kind) {
    case TechniqueKind::Rll: ld = lock_rll(c, t.n, rng, raw); break;
    case TechniqueKind::AntiSat: ld = lock_antisat(c, t.n, rng, raw); break;
    case TechniqueKind::SarLock: ld = lock_sarlock(c, t.n, rng, raw); break;
    case TechniqueKind::TtLock: ld = lock_ttlock(c, t.n, rng, raw); break;
    case TechniqueKind::Cac: ld = lock_cac(c, t.n, rng, raw); break;
    case TechniqueKind::DoubleCac: ld = lock_double_cac(c, t.n, t.m, rng, raw); break;
    case TechniqueKind::Cac2: ld = lock_cac2(c, t.n, t.m, rng, raw); break;
  }
  if (t.rll_bits > 0) add_rll(ld, t.rll_bits, rng);
  ld.technique = t;
  ld.technique.classic = opt.classic_cac;
  finalize_design(ld, rng, opt);
  return ld;
}

std::size_t max_feasible_n(const Circuit& c, TechniqueKind kind) {
  const auto counts = cone_input_counts(c);
  std::size_t best = 0;
  if (kind == TechniqueKind::Rll) {
    for (SignalId s : c.topo()) best += counts[s] >= 2 ? 1 : 0;
    return best;
  }
  for (SignalId po : c.output_ids()) {
    const std::size_t width = counts[po];
    if (kind != TechniqueKind::DoubleCac && kind != TechniqueKind::Cac2) {
      best = std::max(best, width);
      continue;
    }
    if (c.is_input(po)) continue;
    std::size_t inner = 0;
    for (const auto& g : fanin_cone(c, c.name(po)).gates) {
      const SignalId s = c.id(g);
      if (!c.is_output(s)) inner = std::max(inner, counts[s]);
    }
    const std::size_t outer = kind == TechniqueKind::Cac2 ? width / 2 : width;
    best = std::max(best, std::min(outer, inner));
  }
  return best;
}

Circuit apply_key(const LockedDesign& ld, const BitVector& key) {
  if (key.width() != ld.key_inputs.size()) {
    throw InterfaceError("key width " + std::to_string(key.width()) + " != " + std::to_string(ld.key_inputs.size()) +
                         " key inputs");
  }
  std::set<std::string> keys(ld.key_inputs.begin(), ld.key_inputs.end());
  std::vector<std::string> inputs;
  for (const auto& pi : ld.circuit.inputs()) {
    if (!keys.count(pi)) inputs.push_back(pi);
  }
  std::vector<Gate> gates;
  for (std::size_t i = 0; i < ld.key_inputs.size(); ++i) {
    gates.push_back(Gate{ld.key_inputs[i], key[i] ? GateKind::Const1 : GateKind::Const0, {}});
  }
  gates.insert(gates.end(), ld.circuit.gates().begin(), ld.circuit.gates().end());
  return Circuit(std::move(inputs), ld.circuit.outputs(), std::move(gates));
}

}  // namespace locklab
