#include <cmath>

#include "gss/milp.hpp"

namespace gss {

FeasibilityReport check_feasibility(const MilpModel& model, const std::vector<double>& values,
                                    double integrality_tol) {
  FeasibilityReport rep;
  auto note = [&rep](double viol, const std::string& where) {
    if (viol > rep.max_violation) {
      rep.max_violation = viol;
      rep.worst = where;
    }
  };
  const auto& vars = model.variables();
  if (values.size() != vars.size()) {
    rep.max_violation = kInf;
    rep.worst = "value vector size";
    return rep;
  }
  for (const auto& v : vars) {
    const double x = values[v.id];
    if (!std::isfinite(x)) {
      note(kInf, v.name);
      continue;
    }
    note(v.lower - x, v.name);
    note(x - v.upper, v.name);
    if (v.kind == VarKind::binary) {
      const double dist = std::abs(x - std::round(x));
      // Integrality is pass/fail against its own tolerance.
      if (dist > integrality_tol) note(dist, v.name + " (integrality)");
    }
  }
  for (const auto& r : model.constraints()) {
    long double lhs = 0.0L;
    for (const auto& t : r.terms) lhs += static_cast<long double>(t.coef) * values[t.var];
    const double diff = static_cast<double>(lhs - r.rhs);
    switch (r.sense) {
      case RowSense::le: note(diff, r.name); break;
      case RowSense::ge: note(-diff, r.name); break;
      case RowSense::eq: note(std::abs(diff), r.name); break;
    }
  }
  return rep;
}

}  // namespace gss
