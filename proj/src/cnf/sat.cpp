#include "locklab/sat.hpp"

#include <cadical.hpp>

#include <climits>

namespace locklab {

std::string_view to_string(SatStatus s) {
  switch (s) {
    case SatStatus::Sat: return "SAT";
    case SatStatus::Unsat: return "UNSAT";
    case SatStatus::Unknown: return "UNKNOWN";
  }
  return "?";
}

SatBudget SatBudget::seconds(double s) {
  SatBudget b;
  b.deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(s));
  return b;
}

namespace {

class DeadlineTerminator : public CaDiCaL::Terminator {
public:
  explicit DeadlineTerminator(std::chrono::steady_clock::time_point deadline) : deadline_(deadline) {}
  bool terminate() override { return std::chrono::steady_clock::now() >= deadline_; }

private:
  std::chrono::steady_clock::time_point deadline_;
};

class CadicalBackend : public SatBackend {
public:
  CadicalBackend() { solver_.set("quiet", 1); }

  void add_clause(std::span<const Lit> clause) override {
    for (Lit l : clause) {
      max_var_ = std::max(max_var_, l.var());
      solver_.add(l.dimacs());
    }
    solver_.add(0);
  }

  SatStatus solve(std::span<const Lit> assumptions, const SatBudget& budget) override {
    if (budget.deadline && std::chrono::steady_clock::now() >= *budget.deadline) return SatStatus::Unknown;
    for (Lit l : assumptions) {
      max_var_ = std::max(max_var_, l.var());
      solver_.assume(l.dimacs());
    }
    if (budget.conflicts) {
      solver_.limit("conflicts", static_cast<int>(std::min<std::int64_t>(*budget.conflicts, INT_MAX)));
    }
    std::optional<DeadlineTerminator> term;
    if (budget.deadline) {
      term.emplace(*budget.deadline);
      solver_.connect_terminator(&*term);
    }
    const int res = solver_.solve();
    if (term) solver_.disconnect_terminator();
    if (res == 10) return SatStatus::Sat;
    if (res == 20) return SatStatus::Unsat;
    return SatStatus::Unknown;
  }

  bool value(std::uint32_t var) const override {
    if (var == 0 || var > max_var_) return false;
    return solver_.val(static_cast<int>(var)) > 0;
  }

private:
  mutable CaDiCaL::Solver solver_;
  std::uint32_t max_var_ = 0;
};

}  // namespace

std::unique_ptr<SatBackend> make_default_backend() { return std::make_unique<CadicalBackend>(); }

SatSolver::SatSolver(const CnfFormula& formula, std::unique_ptr<SatBackend> backend)
    : formula_(&formula), backend_(std::move(backend)) {}

SatStatus SatSolver::solve(std::span<const Lit> assumptions, const SatBudget& budget) {
  for (; loaded_ < formula_->num_clauses(); ++loaded_) backend_->add_clause(formula_->clause(loaded_));
  return backend_->solve(assumptions, budget);
}

SatOutcome solve(const CnfFormula& f, std::span<const Lit> assumptions, const SatBudget& budget) {
  SatSolver solver(f);
  SatOutcome out;
  out.status = solver.solve(assumptions, budget);
  if (out.status == SatStatus::Sat) {
    std::vector<bool> model(f.num_vars() + 1, false);
    for (std::uint32_t v = 1; v <= f.num_vars(); ++v) model[v] = solver.value(Lit(v));
    out.model = std::move(model);
  }
  return out;
}

EquivalenceResult check_equivalence(const Circuit& a, const Circuit& b, const std::optional<KeyBinding>& bind,
                                    const SatBudget& budget) {
  const EquivalenceMiter m = build_equivalence_miter(a, b, bind);
  SatSolver solver(m.formula);
  EquivalenceResult r;
  r.status = solver.solve({}, budget);
  if (r.status == SatStatus::Sat) {
    Assignment cex;
    for (std::size_t i = 0; i < m.inputs.size(); ++i) cex[m.input_names[i]] = solver.value(m.inputs[i]);
    r.counterexample = std::move(cex);
  }
  return r;
}

}  // namespace locklab
