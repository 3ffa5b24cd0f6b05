#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "locklab/cnf.hpp"

namespace locklab {

enum class SatStatus { Sat, Unsat, Unknown };

std::string_view to_string(SatStatus s);

struct SatBudget {
  std::optional<std::int64_t> conflicts;
  std::optional<std::chrono::steady_clock::time_point> deadline;

  static SatBudget seconds(double s);
};

struct SatOutcome {
  SatStatus status = SatStatus::Unknown;
  /// Indexed by variable (entry 0 unused); present iff status == Sat.
  std::optional<std::vector<bool>> model;

  bool value(Lit l) const { return (*model)[l.var()] != l.negative(); }
};

/// Decision procedure interface so the solver can be swapped.
class SatBackend {
public:
  virtual ~SatBackend() = default;
  virtual void add_clause(std::span<const Lit> clause) = 0;
  virtual SatStatus solve(std::span<const Lit> assumptions, const SatBudget& budget) = 0;
  /// Model value after Sat.
  virtual bool value(std::uint32_t var) const = 0;
};

std::unique_ptr<SatBackend> make_default_backend();

/// Incremental solver bound to one formula. `solve` first loads every clause added
/// to the formula since the previous call.
class SatSolver {
public:
  explicit SatSolver(const CnfFormula& formula, std::unique_ptr<SatBackend> backend = make_default_backend());

  SatStatus solve(std::span<const Lit> assumptions = {}, const SatBudget& budget = {});
  bool value(Lit l) const { return backend_->value(l.var()) != l.negative(); }

private:
  const CnfFormula* formula_;
  std::unique_ptr<SatBackend> backend_;
  std::size_t loaded_ = 0;
};

/// One-shot solve with a full model on Sat.
SatOutcome solve(const CnfFormula& f, std::span<const Lit> assumptions = {}, const SatBudget& budget = {});

struct EquivalenceResult {
  SatStatus status = SatStatus::Unknown;  ///< Unsat means equivalent
  /// Distinguishing assignment over the miter inputs when status == Sat.
  std::optional<Assignment> counterexample;

  bool equivalent() const { return status == SatStatus::Unsat; }
};

EquivalenceResult check_equivalence(const Circuit& a, const Circuit& b,
                                    const std::optional<KeyBinding>& bind = std::nullopt,
                                    const SatBudget& budget = {});

}  // namespace locklab
