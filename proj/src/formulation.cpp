#include "gss/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gss {

namespace {

std::string idx(const char* base, std::initializer_list<std::size_t> ix) {
  std::ostringstream os;
  os << base << '[';
  bool first = true;
  for (std::size_t v : ix) {
    if (!first) os << ',';
    os << v;
    first = false;
  }
  os << ']';
  return os.str();
}

double max_demand(const ProblemInstance& inst, std::size_t i, std::size_t t) {
  double m = 0.0;
  for (const auto& sc : inst.scenarios) m = std::max(m, sc.demand(i, t));
  return m;
}

}  // namespace

const char* to_string(ObjectiveMode m) {
  switch (m) {
    case ObjectiveMode::cost_robust: return "cost";
    case ObjectiveMode::emission_robust: return "emission";
    case ObjectiveMode::quality: return "quality";
    case ObjectiveMode::combined: return "combined";
  }
  return "unknown";
}

void ModelOptions::validate() const {
  if (exclusive_echelon && !zero_breakpoint)
    throw FormulationError("exclusive echelon transport needs the zero breakpoint (an idle echelon carries no load)");
  if (exclusive_echelon && !per_echelon)
    throw FormulationError("exclusive echelon transport needs the per-echelon load identity");
}

VariableMap create_variables(const ProblemInstance& inst, const ModelOptions& opt, MilpModel& model) {
  const auto& d = inst.dims;
  const std::size_t I = d.products, J = d.suppliers, T = d.periods, K = d.truck_types, S = d.scenarios;
  VariableMap v;

  v.breakpoints.clear();
  if (opt.zero_breakpoint) v.breakpoints.push_back(0.0);
  for (double m : inst.det.truck_breakpoints.flat()) v.breakpoints.push_back(m);
  const std::size_t P = v.breakpoints.size();
  v.truck_of_segment.resize(P);
  for (std::size_t k = 0; k < P; ++k) v.truck_of_segment[k] = std::min(k, K - 1);
  const double load_max = v.breakpoints.back();

  const TradePrices prices = derive_trade_prices(inst);
  v.regime = inst.regime.kind;
  if (v.regime == RegimeKind::cap_and_trade) {
    v.buy_cost = prices.buy_price;
    v.sell_revenue = prices.sell_price;
  } else {
    v.buy_cost.assign(T, 0.0);
    for (std::size_t t = 0; t < T; ++t)
      v.buy_cost[t] = inst.regime.penalty_rate ? *inst.regime.penalty_rate : prices.buy_price[t];
    v.sell_revenue.assign(T, 0.0);
  }

  v.x = VarArr3({I, J, T}, kNoVar);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t t = 0; t < T; ++t) v.x(i, j, t) = model.add_variable(idx("x", {i, j, t}), 0.0, load_max);

  v.r = VarArr2({I, T}, kNoVar);
  v.b = VarArr2({I, T}, kNoVar);
  for (std::size_t i = 0; i < I; ++i) {
    double cumulative = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      cumulative += max_demand(inst, i, t);
      v.r(i, t) = model.add_variable(idx("r", {i, t}), 0.0, cumulative);
      v.b(i, t) = model.add_variable(idx("b", {i, t}), 0.0, cumulative);
    }
  }

  const double depth = inst.robust.market_depth_bound;
  v.buy = VarArr1({T}, kNoVar);
  v.sell = VarArr1({T}, kNoVar);
  for (std::size_t t = 0; t < T; ++t) {
    v.buy(t) = model.add_variable(idx("buy", {t}), 0.0, depth);
    const double sell_hi = v.regime == RegimeKind::cap_and_trade ? depth : 0.0;
    v.sell(t) = model.add_variable(idx("sell", {t}), 0.0, sell_hi);
  }

  v.q = VarArr4({J, T, P, kEchelons}, kNoVar);
  v.W = VarArr4({J, T, P, kEchelons}, kNoVar);
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t n = 0; n < kEchelons; ++n)
        for (std::size_t k = 0; k < P; ++k) v.q(j, t, k, n) = model.add_binary(idx("q", {j, t, k, n}));
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t n = 0; n < kEchelons; ++n)
        for (std::size_t k = 0; k < P; ++k) v.W(j, t, k, n) = model.add_variable(idx("W", {j, t, k, n}), 0.0, 1.0);

  if (opt.exclusive_echelon) {
    v.echelon = VarArr2({J, T}, kNoVar);
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t t = 0; t < T; ++t) v.echelon(j, t) = model.add_binary(idx("e", {j, t}));
  }

  v.delta_plus = VarArr4({I, J, T, S}, kNoVar);
  v.delta_minus = VarArr4({I, J, T, S}, kNoVar);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t t = 0; t < T; ++t) {
        const double cap = max_demand(inst, i, t);
        for (std::size_t s = 0; s < S; ++s) {
          v.delta_plus(i, j, t, s) = model.add_variable(idx("dp", {i, j, t, s}), 0.0, cap);
          v.delta_minus(i, j, t, s) = model.add_variable(idx("dm", {i, j, t, s}), 0.0, cap);
        }
      }
  return v;
}

LinearExpr build_scenario_cost(const ProblemInstance& inst, std::size_t s, const VariableMap& v) {
  const auto& d = inst.dims;
  const auto& sc = inst.scenarios.at(s);
  const auto& p = inst.det;
  LinearExpr e;
  const std::size_t I = d.products, J = d.suppliers, T = d.periods;
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t t = 0; t < T; ++t) e.add(v.x(i, j, t), sc.delay_days(j, t) * p.delay_penalty(i, j, t));
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t t = 0; t < T; ++t) e.add(v.x(i, j, t), sc.reject_rate(i, t) * p.reject_loss(i, j, t));
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t t = 0; t < T; ++t) e.add(v.x(i, j, t), sc.purchase_cost(i, j, t));
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t t = 0; t < T; ++t) e.add(v.r(i, t), p.holding_cost(i, t));
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t t = 0; t < T; ++t) e.add(v.b(i, t), p.backorder_cost(i, t));
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t t = 0; t < T; ++t) {
      const double er = sc.reject_rate(i, t), pc = sc.collect_rate(i, t);
      const double u = sc.usable_rejected(i, t), vv = sc.reusable_collected(i, t);
      const double disassembly = (er + pc) * p.disassembly_cost(i, t);
      const double reman = (er * u + pc * vv) * p.remanufacture_cost(i, t);
      const double disposal = (er * (1.0 - u) + pc * (1.0 - vv)) * p.disposal_cost(i, t);
      for (std::size_t j = 0; j < J; ++j) e.add(v.x(i, j, t), disassembly);
      for (std::size_t j = 0; j < J; ++j) e.add(v.x(i, j, t), reman);
      for (std::size_t j = 0; j < J; ++j) e.add(v.x(i, j, t), disposal);
    }
  const std::size_t P = v.breakpoints.size();
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t k = 0; k < P; ++k)
        for (std::size_t n = 0; n < kEchelons; ++n)
          e.add(v.q(j, t, k, n), p.transport_cost(j, t, v.truck_of_segment[k], n));
  for (std::size_t t = 0; t < T; ++t) {
    e.add(v.buy(t), v.buy_cost[t]);
    e.add(v.sell(t), -v.sell_revenue[t]);
  }
  e.normalize();
  return e;
}

namespace {

void add_transport_emission(const ProblemInstance& inst, const VariableMap& v, std::size_t t, LinearExpr& e) {
  const auto& p = inst.det;
  const std::size_t P = v.breakpoints.size();
  for (std::size_t j = 0; j < inst.dims.suppliers; ++j)
    for (std::size_t k = 0; k < P; ++k)
      e.add(v.q(j, t, k, kBuyerEchelon),
            p.distance(j) * p.transport_emission(j, t, v.truck_of_segment[k], kBuyerEchelon));
}

void add_material_emission(const ProblemInstance& inst, const ScenarioData& sc, const VariableMap& v, std::size_t t,
                           LinearExpr& e) {
  const auto& p = inst.det;
  for (std::size_t i = 0; i < inst.dims.products; ++i) {
    const double reman = (sc.reject_rate(i, t) * sc.usable_rejected(i, t) +
                          sc.collect_rate(i, t) * sc.reusable_collected(i, t)) *
                         p.remanufacture_emission(i, t);
    for (std::size_t j = 0; j < inst.dims.suppliers; ++j) e.add(v.x(i, j, t), p.production_emission(i, j, t) + reman);
  }
}

}  // namespace

LinearExpr build_scenario_emission(const ProblemInstance& inst, std::size_t s, const VariableMap& v) {
  const auto& sc = inst.scenarios.at(s);
  LinearExpr e;
  for (std::size_t t = 0; t < inst.dims.periods; ++t) add_transport_emission(inst, v, t, e);
  for (std::size_t t = 0; t < inst.dims.periods; ++t) add_material_emission(inst, sc, v, t, e);
  e.normalize();
  return e;
}

LinearExpr build_period_emission(const ProblemInstance& inst, std::size_t t, std::size_t s, const VariableMap& v) {
  LinearExpr e;
  add_transport_emission(inst, v, t, e);
  add_material_emission(inst, inst.scenarios.at(s), v, t, e);
  e.normalize();
  return e;
}

LinearExpr build_quality(const ProblemInstance& inst, const VariableMap& v) {
  const auto& p = inst.det;
  LinearExpr e;
  for (std::size_t i = 0; i < inst.dims.products; ++i)
    for (std::size_t j = 0; j < inst.dims.suppliers; ++j)
      for (std::size_t t = 0; t < inst.dims.periods; ++t)
        e.add(v.x(i, j, t), p.score_em(i, j, t) + p.score_gp(i, j, t) + p.score_re(i, j, t) + p.score_pt(i, j, t));
  e.normalize();
  return e;
}

void add_core_constraints(const ProblemInstance& inst, const ModelOptions& opt, const VariableMap& v,
                          MilpModel& model) {
  const auto& d = inst.dims;
  const std::size_t I = d.products, J = d.suppliers, T = d.periods, S = d.scenarios;

  // Emission cap with allowance trading (or excess emission under a penalty).
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t s = 0; s < S; ++s) {
      LinearExpr e = build_period_emission(inst, t, s, v);
      e.add(v.buy(t), -1.0);
      e.add(v.sell(t), 1.0);
      model.add_constraint(idx("cap", {t, s}), e, RowSense::le, inst.det.emission_cap(t));
    }

  // Inventory balance.
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t s = 0; s < S; ++s) {
        const auto& sc = inst.scenarios[s];
        const double gain = sc.usable_rejected(i, t) * sc.reject_rate(i, t) +
                            sc.reusable_collected(i, t) * sc.collect_rate(i, t) + 1.0;
        LinearExpr e;
        for (std::size_t j = 0; j < J; ++j) e.add(v.x(i, j, t), gain);
        e.add(v.b(i, t), 1.0);
        if (t > 0) e.add(v.r(i, t - 1), 1.0);
        for (std::size_t j = 0; j < J; ++j) e.add(v.delta_minus(i, j, t, s), 1.0);
        e.add(v.r(i, t), -1.0);
        if (t > 0) e.add(v.b(i, t - 1), -1.0);
        for (std::size_t j = 0; j < J; ++j) e.add(v.delta_plus(i, j, t, s), -1.0);
        model.add_constraint(idx("bal", {i, t, s}), e, RowSense::eq, sc.demand(i, t));
      }

  // Truck category selection through load breakpoints.
  const std::size_t P = v.breakpoints.size();
  const double load_max = v.breakpoints.back();
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t t = 0; t < T; ++t) {
      LinearExpr order;
      for (std::size_t i = 0; i < I; ++i) order.add(v.x(i, j, t), 1.0);
      std::vector<LinearExpr> load(kEchelons);
      for (std::size_t n = 0; n < kEchelons; ++n)
        for (std::size_t k = 0; k < P; ++k) load[n].add(v.W(j, t, k, n), v.breakpoints[k]);

      if (opt.per_echelon && !opt.exclusive_echelon) {
        for (std::size_t n = 0; n < kEchelons; ++n) {
          LinearExpr e = order;
          e.add(load[n], -1.0);
          model.add_constraint(idx("load", {j, t, n}), e, RowSense::eq, 0.0);
        }
      } else {
        LinearExpr e = order;
        for (std::size_t n = 0; n < kEchelons; ++n) e.add(load[n], -1.0);
        model.add_constraint(idx("load", {j, t}), e, RowSense::eq, 0.0);
      }
      if (opt.exclusive_echelon) {
        LinearExpr sup = load[kSupplierEchelon];
        sup.add(v.echelon(j, t), load_max);
        model.add_constraint(idx("excl", {j, t, kSupplierEchelon}), sup, RowSense::le, load_max);
        LinearExpr buy = load[kBuyerEchelon];
        buy.add(v.echelon(j, t), -load_max);
        model.add_constraint(idx("excl", {j, t, kBuyerEchelon}), buy, RowSense::le, 0.0);
      }

      for (std::size_t n = 0; n < kEchelons; ++n) {
        model.add_constraint(idx("adj0", {j, t, n}), LinearExpr().add(v.W(j, t, 0, n), 1).add(v.q(j, t, 0, n), -1),
                             RowSense::le, 0.0);
        for (std::size_t k = 0; k + 1 < P; ++k) {
          LinearExpr e;
          e.add(v.W(j, t, k + 1, n), 1).add(v.q(j, t, k + 1, n), -1).add(v.q(j, t, k, n), -1);
          model.add_constraint(idx("adj", {j, t, k + 1, n}), e, RowSense::le, 0.0);
        }
        if (P >= 2) {
          LinearExpr e;
          e.add(v.W(j, t, P - 1, n), 1).add(v.q(j, t, P - 2, n), -1);
          model.add_constraint(idx("adjK", {j, t, n}), e, RowSense::le, 0.0);
        }
        LinearExpr sq, sw;
        for (std::size_t k = 0; k < P; ++k) {
          sq.add(v.q(j, t, k, n), 1.0);
          sw.add(v.W(j, t, k, n), 1.0);
        }
        model.add_constraint(idx("sumq", {j, t, n}), sq, RowSense::eq, 1.0);
        model.add_constraint(idx("sumW", {j, t, n}), sw, RowSense::eq, 1.0);
      }
    }
}

LinearExpr build_robust_objective(const ProblemInstance& inst, int which, const std::vector<LinearExpr>& xi,
                                  VariableMap& v, MilpModel& model) {
  const std::size_t S = inst.dims.scenarios;
  const double lambda = which == 1 ? inst.robust.lambda1 : inst.robust.lambda2;
  const char* tag = which == 1 ? "1" : "2";
  VarArr1 zeta({S}, kNoVar), theta({S}, kNoVar);
  for (std::size_t s = 0; s < S; ++s) {
    zeta(s) = model.add_variable(idx((std::string("zeta") + tag).c_str(), {s}), -kInf, kInf);
    theta(s) = model.add_variable(idx((std::string("theta") + tag).c_str(), {s}), 0.0, kInf);
  }
  for (std::size_t s = 0; s < S; ++s) {
    LinearExpr e = xi.at(s);
    e.add(zeta(s), -1.0);
    model.add_constraint(idx((std::string("xi") + tag).c_str(), {s}), e, RowSense::eq, 0.0);
  }
  LinearExpr mean;
  for (std::size_t s = 0; s < S; ++s) mean.add(zeta(s), inst.scenarios[s].probability);
  for (std::size_t s = 0; s < S; ++s) {
    LinearExpr e;
    e.add(zeta(s), 1.0).add(mean, -1.0).add(theta(s), 1.0);
    model.add_constraint(idx((std::string("dev") + tag).c_str(), {s}), e, RowSense::ge, 0.0);
  }

  LinearExpr obj = mean;
  for (std::size_t s = 0; s < S; ++s) {
    const double pr = inst.scenarios[s].probability;
    LinearExpr dev;
    dev.add(zeta(s), 1.0).add(mean, -1.0).add(theta(s), 2.0);
    obj.add(dev, lambda * pr);
  }
  for (std::size_t s = 0; s < S; ++s) {
    const double w = inst.robust.omega * inst.scenarios[s].probability;
    for (std::size_t i = 0; i < inst.dims.products; ++i)
      for (std::size_t j = 0; j < inst.dims.suppliers; ++j)
        for (std::size_t t = 0; t < inst.dims.periods; ++t) {
          obj.add(v.delta_minus(i, j, t, s), w);
          obj.add(v.delta_plus(i, j, t, s), w);
        }
  }
  obj.normalize();
  if (which == 1) {
    v.zeta1 = zeta;
    v.theta1 = theta;
  } else {
    v.zeta2 = zeta;
    v.theta2 = theta;
  }
  return obj;
}

BuiltModel build_full_model(const ProblemInstance& inst, ObjectiveMode mode, const ModelOptions& opt,
                            const ReferenceOptima& ref) {
  opt.validate();
  require_valid(inst);
  if (mode == ObjectiveMode::combined) {
    for (double z : {ref.z1, ref.z2, ref.z3}) {
      if (!std::isfinite(z))
        throw NormalizationError("combined objective needs finite reference optima; solve the individual objectives first");
      if (z == 0.0)
        throw NormalizationError(
            "a reference optimum is zero, so its normalised deviation is undefined; shift that objective by a "
            "constant to make its optimum non-zero");
    }
  }

  BuiltModel out;
  out.mode = mode;
  MilpModel& model = out.model;
  out.vars = create_variables(inst, opt, model);
  VariableMap& v = out.vars;

  const std::size_t S = inst.dims.scenarios;
  for (std::size_t s = 0; s < S; ++s) {
    out.exprs.xi1.push_back(build_scenario_cost(inst, s, v));
    out.exprs.xi2.push_back(build_scenario_emission(inst, s, v));
  }
  out.exprs.z3 = build_quality(inst, v);
  add_core_constraints(inst, opt, v, model);

  const bool need1 = mode == ObjectiveMode::cost_robust || mode == ObjectiveMode::combined;
  const bool need2 = mode == ObjectiveMode::emission_robust || mode == ObjectiveMode::combined;
  if (need1) out.exprs.z1 = build_robust_objective(inst, 1, out.exprs.xi1, v, model);
  if (need2) out.exprs.z2 = build_robust_objective(inst, 2, out.exprs.xi2, v, model);

  switch (mode) {
    case ObjectiveMode::cost_robust: model.set_objective(out.exprs.z1, ObjSense::minimize); break;
    case ObjectiveMode::emission_robust: model.set_objective(out.exprs.z2, ObjSense::minimize); break;
    case ObjectiveMode::quality: model.set_objective(out.exprs.z3, ObjSense::maximize); break;
    case ObjectiveMode::combined: {
      // Dividing by |z*| keeps each term a non-negative distance even when a
      // reference optimum is negative.
      LinearExpr obj;
      obj.add(out.exprs.z1, 1.0 / std::abs(ref.z1)).add_constant(-ref.z1 / std::abs(ref.z1));
      obj.add(out.exprs.z2, 1.0 / std::abs(ref.z2)).add_constant(-ref.z2 / std::abs(ref.z2));
      obj.add(out.exprs.z3, -1.0 / std::abs(ref.z3)).add_constant(ref.z3 / std::abs(ref.z3));
      model.set_objective(obj, ObjSense::minimize);
      break;
    }
  }
  return out;
}

BuiltModel build_penalty_regime_model(const ProblemInstance& inst, std::optional<double> penalty_rate,
                                      ObjectiveMode mode, const ModelOptions& opt, const ReferenceOptima& ref) {
  if (penalty_rate && !(*penalty_rate >= 0.0)) throw FormulationError("penalty rate must be non-negative");
  ProblemInstance copy = inst;
  copy.regime.kind = RegimeKind::penalty;
  copy.regime.penalty_rate = penalty_rate;
  return build_full_model(copy, mode, opt, ref);
}

std::vector<std::string> active_guards(const ProblemInstance& inst, const BuiltModel& built,
                                       const std::vector<double>& values) {
  std::vector<std::string> out;
  const auto& vars = built.model.variables();
  auto tight = [&](VarId id) {
    const double hi = vars[id].upper;
    return hi > 0.0 && std::isfinite(hi) && values.at(id) >= hi - 1e-6 * std::max(1.0, hi);
  };
  auto scan = [&](const auto& arr, const char* name) {
    for (VarId id : arr.flat()) {
      if (id != kNoVar && tight(id)) {
        out.emplace_back(name);
        return;
      }
    }
  };
  scan(built.vars.delta_plus, "delta_plus <= max scenario demand");
  scan(built.vars.delta_minus, "delta_minus <= max scenario demand");
  scan(built.vars.r, "r <= cumulative demand");
  scan(built.vars.b, "b <= cumulative demand");
  if (inst.robust.market_depth_bound > 0.0) {
    scan(built.vars.buy, "buy <= market_depth_bound");
    scan(built.vars.sell, "sell <= market_depth_bound");
  }
  return out;
}

}  // namespace gss
