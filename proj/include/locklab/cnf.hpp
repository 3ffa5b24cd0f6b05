#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "locklab/bitvector.hpp"
#include "locklab/netlist.hpp"

namespace locklab {

/// Propositional literal: variable index >= 1 plus a sign.
class Lit {
public:
  Lit() = default;
  explicit Lit(std::uint32_t var, bool negative = false)
      : code_(negative ? -static_cast<std::int32_t>(var) : static_cast<std::int32_t>(var)) {}

  static Lit from_dimacs(std::int32_t value) {
    Lit l;
    l.code_ = value;
    return l;
  }

  std::uint32_t var() const { return static_cast<std::uint32_t>(code_ < 0 ? -code_ : code_); }
  bool negative() const { return code_ < 0; }
  std::int32_t dimacs() const { return code_; }
  Lit operator~() const { return from_dimacs(-code_); }

  friend bool operator==(Lit, Lit) = default;

private:
  std::int32_t code_ = 0;
};

/// Clause database. Clauses are normalized on insertion: repeated literals are
/// dropped and tautologies are discarded. An empty clause is a contradiction and
/// throws instead of being stored.
class CnfFormula {
public:
  std::uint32_t num_vars() const { return num_vars_; }
  std::size_t num_clauses() const { return starts_.size(); }

  std::uint32_t new_var() { return ++num_vars_; }

  /// Literal fixed to true by a unit clause, allocated on first use.
  Lit true_lit();

  void add_clause(std::span<const Lit> clause);
  void add_clause(std::initializer_list<Lit> clause) { add_clause(std::span<const Lit>(clause.begin(), clause.size())); }

  std::span<const Lit> clause(std::size_t i) const;

private:
  std::uint32_t num_vars_ = 0;
  std::optional<Lit> true_;
  std::vector<Lit> lits_;
  std::vector<std::size_t> starts_;
};

/// (instance tag, signal name) -> variable. The only authority on which variable
/// stands for which signal in a formula.
class VarMap {
public:
  void set(std::string_view tag, std::string_view name, std::uint32_t var);
  std::optional<std::uint32_t> find(std::string_view tag, std::string_view name) const;
  /// Throws Error for unmapped pairs.
  std::uint32_t at(std::string_view tag, std::string_view name) const;
  std::size_t size() const { return map_.size(); }

private:
  static std::string key(std::string_view tag, std::string_view name);
  std::unordered_map<std::string, std::uint32_t> map_;
};

/// Literal of every signal of an encoded circuit copy (indexed by SignalId).
struct Encoding {
  std::vector<Lit> signal;

  Lit operator[](SignalId s) const { return signal[s]; }
};

struct EncodeOptions {
  /// Signals (usually PIs) that reuse an existing literal instead of a fresh variable.
  std::unordered_map<std::string, Lit> shared;
  /// Propagate constants and fold NOT/BUFF into literal polarity. Off gives the
  /// textbook one-variable-per-gate encoding.
  bool fold = false;
};

/// Tseitin encoding of `c` appended to `f`; fresh variables are recorded in `vars`
/// under `tag`.
Encoding tseitin_encode(const Circuit& c, CnfFormula& f, VarMap& vars, std::string_view tag,
                        const EncodeOptions& options = {});

/// `p cnf V C` header followed by one `0`-terminated line per clause.
std::string export_dimacs(const CnfFormula& f);

// ---------------------------------------------------------------------------
// Miters

/// Formula for the oracle-guided attack: one shared copy of the functional inputs,
/// two key copies and two circuit copies. The output-difference clause is guarded
/// by `diff_enable`, so the accumulated I/O constraints can be solved alone.
struct AttackMiter {
  Circuit locked;
  std::vector<std::string> key_names;
  std::vector<std::string> input_names;  ///< non-key PIs in locked-circuit order
  CnfFormula formula;
  VarMap vars;
  std::vector<Lit> inputs;
  std::vector<Lit> key1;
  std::vector<Lit> key2;
  Lit diff_enable;
};

AttackMiter build_attack_miter(const Circuit& locked, const std::vector<std::string>& key_names);

/// Both key copies must reproduce `oracle_out` on `dip`. Widths are checked against
/// the functional inputs and the outputs.
void add_dip_constraint(AttackMiter& miter, const BitVector& dip, const BitVector& oracle_out);

/// Key inputs of the second circuit in an equivalence check. With `bits` they are
/// tied to constants; without, they stay free, so the miter asks whether some
/// (input, key) pair tells the circuits apart.
struct KeyBinding {
  std::vector<std::string> names;
  std::optional<BitVector> bits;
};

struct EquivalenceMiter {
  CnfFormula formula;
  VarMap vars;
  std::vector<std::string> input_names;  ///< PIs of `b` that remain variables
  std::vector<Lit> inputs;
};

/// UNSAT iff `a` and `b` agree on every PO (paired by name) for every input.
EquivalenceMiter build_equivalence_miter(const Circuit& a, const Circuit& b,
                                         const std::optional<KeyBinding>& bind = std::nullopt);

}  // namespace locklab
