#include <algorithm>
#include <unordered_map>

#include "gss/milp.hpp"

namespace gss {

LinearExpr& LinearExpr::add(const LinearExpr& other, double scale) {
  for (const auto& t : other.terms_) terms_.push_back({t.var, t.coef * scale});
  constant_ += other.constant_ * scale;
  return *this;
}

void LinearExpr::normalize() {
  std::unordered_map<VarId, std::size_t> slot;
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    auto [it, fresh] = slot.try_emplace(t.var, merged.size());
    if (fresh) {
      merged.push_back(t);
    } else {
      merged[it->second].coef += t.coef;
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  terms_ = std::move(merged);
}

double LinearExpr::evaluate(const std::vector<double>& values) const {
  double acc = constant_;
  for (const auto& t : terms_) acc += t.coef * values.at(t.var);
  return acc;
}

VarId MilpModel::add_variable(std::string name, double lower, double upper, VarKind kind) {
  const VarId id = vars_.size();
  vars_.push_back({id, std::move(name), lower, upper, kind});
  return id;
}

std::size_t MilpModel::add_constraint(std::string name, LinearExpr expr, RowSense sense, double rhs) {
  expr.normalize();
  rows_.push_back({std::move(name), expr.terms(), sense, rhs - expr.constant()});
  return rows_.size() - 1;
}

void MilpModel::set_objective(LinearExpr expr, ObjSense sense) {
  expr.normalize();
  objective_ = std::move(expr);
  sense_ = sense;
}

void MilpModel::set_bounds(VarId v, double lower, double upper) {
  vars_.at(v).lower = lower;
  vars_.at(v).upper = upper;
}

std::size_t MilpModel::num_binaries() const {
  return static_cast<std::size_t>(
      std::count_if(vars_.begin(), vars_.end(), [](const Variable& v) { return v.kind == VarKind::binary; }));
}

void MilpModel::validate() const {
  for (const auto& v : vars_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
      throw ModelError("variable " + v.name + ": invalid bounds");
    if (v.lower == kInf || v.upper == -kInf) throw ModelError("variable " + v.name + ": empty domain");
    if (v.kind == VarKind::binary && (v.lower < 0.0 || v.upper > 1.0))
      throw ModelError("variable " + v.name + ": binary bounds outside [0, 1]");
  }
  auto check_terms = [&](const std::vector<Term>& terms, const std::string& where) {
    std::vector<char> seen(vars_.size(), 0);
    for (const auto& t : terms) {
      if (t.var >= vars_.size()) throw ModelError(where + ": references undeclared variable");
      if (!std::isfinite(t.coef)) throw ModelError(where + ": non-finite coefficient");
      if (seen[t.var]++) throw ModelError(where + ": duplicate variable " + vars_[t.var].name);
    }
  };
  for (const auto& r : rows_) {
    check_terms(r.terms, "constraint " + r.name);
    if (!std::isfinite(r.rhs)) throw ModelError("constraint " + r.name + ": non-finite right-hand side");
  }
  check_terms(objective_.terms(), "objective");
  if (!std::isfinite(objective_.constant())) throw ModelError("objective: non-finite constant");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::gap_limit: return "gap_limit";
    case SolveStatus::node_limit: return "node_limit";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

}  // namespace gss
