#include <algorithm>

#include "locklab/cnf.hpp"
#include "locklab/error.hpp"

namespace locklab {

Lit CnfFormula::true_lit() {
  if (!true_) {
    true_ = Lit(new_var());
    add_clause({*true_});
  }
  return *true_;
}

void CnfFormula::add_clause(std::span<const Lit> clause) {
  const std::size_t start = lits_.size();
  for (Lit l : clause) {
    if (l.var() == 0 || l.var() > num_vars_) {
      lits_.resize(start);
      throw Error("clause literal " + std::to_string(l.dimacs()) + " outside 1.." + std::to_string(num_vars_));
    }
    bool skip = false;
    for (std::size_t i = start; i < lits_.size(); ++i) {
      if (lits_[i] == l) skip = true;
      if (lits_[i] == ~l) {
        lits_.resize(start);
        return;
      }
    }
    if (!skip) lits_.push_back(l);
  }
  if (lits_.size() == start) throw Error("empty clause added to formula");
  starts_.push_back(start);
}

std::span<const Lit> CnfFormula::clause(std::size_t i) const {
  const std::size_t end = i + 1 < starts_.size() ? starts_[i + 1] : lits_.size();
  return {lits_.data() + starts_[i], end - starts_[i]};
}

std::string VarMap::key(std::string_view tag, std::string_view name) {
  std::string k(tag);
  k += '\x1f';
  k += name;
  return k;
}

void VarMap::set(std::string_view tag, std::string_view name, std::uint32_t var) {
  auto [it, inserted] = map_.emplace(key(tag, name), var);
  if (!inserted) throw Error("variable already mapped for " + std::string(tag) + ":" + std::string(name));
}

std::optional<std::uint32_t> VarMap::find(std::string_view tag, std::string_view name) const {
  auto it = map_.find(key(tag, name));
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t VarMap::at(std::string_view tag, std::string_view name) const {
  auto v = find(tag, name);
  if (!v) throw Error("no variable for " + std::string(tag) + ":" + std::string(name));
  return *v;
}

std::string export_dimacs(const CnfFormula& f) {
  std::string out = "p cnf " + std::to_string(f.num_vars()) + " " + std::to_string(f.num_clauses()) + "\n";
  for (std::size_t i = 0; i < f.num_clauses(); ++i) {
    for (Lit l : f.clause(i)) {
      out += std::to_string(l.dimacs());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

}  // namespace locklab
