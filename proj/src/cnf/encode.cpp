#include <algorithm>

#include "locklab/cnf.hpp"
#include "locklab/error.hpp"

namespace locklab {
namespace {

class Encoder {
public:
  Encoder(CnfFormula& f, bool fold) : f_(f), fold_(fold) {}

  Lit fresh() { return Lit(f_.new_var()); }

  // y <-> AND(in)
  Lit and_of(std::vector<Lit> in) {
    if (fold_) {
      const Lit t = f_.true_lit();
      std::vector<Lit> kept;
      for (Lit l : in) {
        if (l == ~t) return ~t;
        if (l == t || std::find(kept.begin(), kept.end(), l) != kept.end()) continue;
        if (std::find(kept.begin(), kept.end(), ~l) != kept.end()) return ~t;
        kept.push_back(l);
      }
      if (kept.empty()) return t;
      if (kept.size() == 1) return kept[0];
      in = std::move(kept);
    }
    const Lit y = fresh();
    std::vector<Lit> big{y};
    for (Lit l : in) {
      f_.add_clause({~y, l});
      big.push_back(~l);
    }
    f_.add_clause(big);
    return y;
  }

  Lit or_of(std::vector<Lit> in) {
    if (fold_) {
      for (auto& l : in) l = ~l;
      return ~and_of(std::move(in));
    }
    // y <-> OR(in): (y v ~a) per input, (~y v a1 v ... v an).
    const Lit y = fresh();
    std::vector<Lit> big{~y};
    for (Lit l : in) {
      f_.add_clause({y, ~l});
      big.push_back(l);
    }
    f_.add_clause(big);
    return y;
  }

  Lit xor2(Lit a, Lit b) {
    if (fold_) {
      const Lit t = f_.true_lit();
      if (a == t) return ~b;
      if (a == ~t) return b;
      if (b == t) return ~a;
      if (b == ~t) return a;
      if (a == b) return ~t;
      if (a == ~b) return t;
    }
    const Lit y = fresh();
    f_.add_clause({~y, a, b});
    f_.add_clause({~y, ~a, ~b});
    f_.add_clause({y, ~a, b});
    f_.add_clause({y, a, ~b});
    return y;
  }

  Lit xor_of(std::span<const Lit> in) {
    Lit acc = in[0];
    for (std::size_t i = 1; i < in.size(); ++i) acc = xor2(acc, in[i]);
    return acc;
  }

  // y <-> ~a, or y <-> a when `same`.
  Lit copy(Lit a, bool same) {
    if (fold_) return same ? a : ~a;
    const Lit y = fresh();
    const Lit src = same ? a : ~a;
    f_.add_clause({~y, src});
    f_.add_clause({y, ~src});
    return y;
  }

  Lit constant(bool v) {
    if (fold_) return v ? f_.true_lit() : ~f_.true_lit();
    const Lit y = fresh();
    f_.add_clause({v ? y : ~y});
    return y;
  }

  Lit gate(GateKind kind, std::span<const Lit> in) {
    switch (kind) {
      case GateKind::And: return and_of({in.begin(), in.end()});
      case GateKind::Or: return or_of({in.begin(), in.end()});
      case GateKind::Nand: return fold_ ? ~and_of({in.begin(), in.end()}) : nand_plain(in);
      case GateKind::Nor: return fold_ ? ~or_of({in.begin(), in.end()}) : nor_plain(in);
      case GateKind::Xor: return xor_of(in);
      case GateKind::Xnor: return fold_ ? ~xor_of(in) : xnor_plain(in);
      case GateKind::Not: return copy(in[0], false);
      case GateKind::Buff: return copy(in[0], true);
      case GateKind::Const0: return constant(false);
      case GateKind::Const1: return constant(true);
    }
    return constant(false);
  }

private:
  CnfFormula& f_;
  bool fold_;

  Lit nand_plain(std::span<const Lit> in) {
    const Lit y = fresh();
    std::vector<Lit> big{~y};
    for (Lit l : in) {
      f_.add_clause({y, l});
      big.push_back(~l);
    }
    f_.add_clause(big);
    return y;
  }

  Lit nor_plain(std::span<const Lit> in) {
    const Lit y = fresh();
    std::vector<Lit> big{y};
    for (Lit l : in) {
      f_.add_clause({~y, ~l});
      big.push_back(l);
    }
    f_.add_clause(big);
    return y;
  }

  Lit xnor_plain(std::span<const Lit> in) {
    const Lit a = xor_of(in.first(in.size() - 1));
    const Lit b = in.back();
    const Lit y = fresh();
    f_.add_clause({~y, ~a, b});
    f_.add_clause({~y, a, ~b});
    f_.add_clause({y, a, b});
    f_.add_clause({y, ~a, ~b});
    return y;
  }
};

}  // namespace

Encoding tseitin_encode(const Circuit& c, CnfFormula& f, VarMap& vars, std::string_view tag,
                        const EncodeOptions& options) {
  Encoder enc(f, options.fold);
  if (options.fold) f.true_lit();
  Encoding e;
  e.signal.resize(c.num_signals());
  for (SignalId i = 0; i < c.num_inputs(); ++i) {
    const std::string& name = c.name(i);
    if (auto it = options.shared.find(name); it != options.shared.end()) {
      e.signal[i] = it->second;
      continue;
    }
    e.signal[i] = enc.fresh();
    vars.set(tag, name, e.signal[i].var());
  }
  std::vector<Lit> in;
  for (SignalId s : c.topo()) {
    const std::string& name = c.name(s);
    if (auto it = options.shared.find(name); it != options.shared.end()) {
      e.signal[s] = it->second;
      continue;
    }
    in.clear();
    for (SignalId fi : c.fanins(s)) in.push_back(e.signal[fi]);
    const std::uint32_t before = f.num_vars();
    e.signal[s] = enc.gate(c.kind(s), in);
    if (e.signal[s].var() > before) vars.set(tag, name, e.signal[s].var());
  }
  return e;
}

}  // namespace locklab
