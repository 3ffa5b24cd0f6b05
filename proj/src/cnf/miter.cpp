#include <algorithm>
#include <set>
#include <unordered_set>

#include "locklab/cnf.hpp"
#include "locklab/error.hpp"

namespace locklab {
namespace {

// Adds `any = OR_j (a_j xor b_j)` guarded by `enable`: enable -> some pair differs.
void add_difference(CnfFormula& f, std::span<const Lit> a, std::span<const Lit> b, Lit enable) {
  std::vector<Lit> any{~enable};
  const Lit t = f.true_lit();
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] == b[j]) continue;
    if (a[j] == ~b[j]) {
      any.push_back(t);
      continue;
    }
    const Lit d(f.new_var());
    f.add_clause({~d, a[j], b[j]});
    f.add_clause({~d, ~a[j], ~b[j]});
    f.add_clause({d, ~a[j], b[j]});
    f.add_clause({d, a[j], ~b[j]});
    any.push_back(d);
  }
  if (any.size() == 1) {
    // No output can differ: enabling the miter is a contradiction.
    f.add_clause({~enable});
    return;
  }
  f.add_clause(any);
}

std::vector<Lit> output_lits(const Circuit& c, const Encoding& e) {
  std::vector<Lit> out;
  for (SignalId po : c.output_ids()) out.push_back(e[po]);
  return out;
}

}  // namespace

AttackMiter build_attack_miter(const Circuit& locked, const std::vector<std::string>& key_names) {
  AttackMiter m;
  m.locked = locked;
  m.key_names = key_names;
  std::unordered_set<std::string> keys(key_names.begin(), key_names.end());
  for (const auto& k : key_names) {
    if (!locked.has(k) || !locked.is_input(locked.id(k))) throw InterfaceError("key " + k + " is not a primary input");
  }
  for (const auto& pi : locked.inputs()) {
    if (!keys.count(pi)) m.input_names.push_back(pi);
  }

  CnfFormula& f = m.formula;
  f.true_lit();
  EncodeOptions first;
  first.fold = true;
  for (const auto& pi : m.input_names) {
    const Lit x(f.new_var());
    m.vars.set("x", pi, x.var());
    m.inputs.push_back(x);
    first.shared.emplace(pi, x);
  }
  EncodeOptions second = first;
  for (const auto& k : key_names) {
    const Lit k1(f.new_var());
    const Lit k2(f.new_var());
    m.vars.set("k1", k, k1.var());
    m.vars.set("k2", k, k2.var());
    m.key1.push_back(k1);
    m.key2.push_back(k2);
    first.shared.emplace(k, k1);
    second.shared.emplace(k, k2);
  }
  const Encoding a = tseitin_encode(locked, f, m.vars, "a", first);
  const Encoding b = tseitin_encode(locked, f, m.vars, "b", second);
  m.diff_enable = Lit(f.new_var());
  m.vars.set("miter", "enable", m.diff_enable.var());
  add_difference(f, output_lits(locked, a), output_lits(locked, b), m.diff_enable);
  return m;
}

void add_dip_constraint(AttackMiter& m, const BitVector& dip, const BitVector& oracle_out) {
  if (dip.width() != m.input_names.size()) {
    throw InterfaceError("DIP width " + std::to_string(dip.width()) + " != " + std::to_string(m.input_names.size()) +
                         " functional inputs");
  }
  if (oracle_out.width() != m.locked.num_outputs()) {
    throw InterfaceError("oracle output width " + std::to_string(oracle_out.width()) + " != " +
                         std::to_string(m.locked.num_outputs()) + " outputs");
  }
  CnfFormula& f = m.formula;
  const Lit t = f.true_lit();
  for (const auto* keys : {&m.key1, &m.key2}) {
    VarMap scratch;  // constant copies are anonymous
    EncodeOptions opt;
    opt.fold = true;
    for (std::size_t i = 0; i < m.input_names.size(); ++i) opt.shared.emplace(m.input_names[i], dip[i] ? t : ~t);
    for (std::size_t i = 0; i < m.key_names.size(); ++i) opt.shared.emplace(m.key_names[i], (*keys)[i]);
    const Encoding e = tseitin_encode(m.locked, f, scratch, "dip", opt);
    auto outs = m.locked.output_ids();
    for (std::size_t j = 0; j < outs.size(); ++j) {
      const Lit o = e[outs[j]];
      f.add_clause({oracle_out[j] ? o : ~o});
    }
  }
}

EquivalenceMiter build_equivalence_miter(const Circuit& a, const Circuit& b, const std::optional<KeyBinding>& bind) {
  std::set<std::string> bound;
  if (bind) {
    if (bind->bits && bind->bits->width() != bind->names.size()) {
      throw InterfaceError("key binding has " + std::to_string(bind->names.size()) + " names but " +
                           std::to_string(bind->bits->width()) + " bits");
    }
    for (const auto& k : bind->names) {
      auto s = b.find(k);
      if (!s || !b.is_input(*s)) throw InterfaceError("key " + k + " is not a primary input of the second circuit");
      bound.insert(k);
    }
  }
  std::set<std::string> pa(a.inputs().begin(), a.inputs().end());
  std::set<std::string> pb;
  for (const auto& pi : b.inputs()) {
    if (!bound.count(pi)) pb.insert(pi);
  }
  if (pa != pb) throw InterfaceError("primary input sets differ");
  std::set<std::string> oa(a.outputs().begin(), a.outputs().end());
  std::set<std::string> ob(b.outputs().begin(), b.outputs().end());
  if (oa != ob) throw InterfaceError("primary output sets differ");

  EquivalenceMiter m;
  CnfFormula& f = m.formula;
  const Lit t = f.true_lit();
  EncodeOptions shared;
  shared.fold = true;
  for (const auto& pi : a.inputs()) {
    const Lit x(f.new_var());
    m.vars.set("x", pi, x.var());
    m.input_names.push_back(pi);
    m.inputs.push_back(x);
    shared.shared.emplace(pi, x);
  }
  EncodeOptions second = shared;
  if (bind) {
    for (std::size_t i = 0; i < bind->names.size(); ++i) {
      const std::string& k = bind->names[i];
      if (bind->bits) {
        second.shared.emplace(k, (*bind->bits)[i] ? t : ~t);
      } else {
        const Lit x(f.new_var());
        m.vars.set("x", k, x.var());
        m.input_names.push_back(k);
        m.inputs.push_back(x);
        second.shared.emplace(k, x);
      }
    }
  }
  const Encoding ea = tseitin_encode(a, f, m.vars, "a", shared);
  const Encoding eb = tseitin_encode(b, f, m.vars, "b", second);
  std::vector<Lit> la;
  std::vector<Lit> lb;
  for (const auto& po : a.outputs()) {
    la.push_back(ea[a.id(po)]);
    lb.push_back(eb[b.id(po)]);
  }
  add_difference(f, la, lb, t);
  return m;
}

}  // namespace locklab
