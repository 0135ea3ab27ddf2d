#include "gss/procedure.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include <json.hpp>

namespace gss {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double weighted_abs_deviation(const ProblemInstance& inst, const Vec1& xi) {
  double mean = 0.0;
  for (std::size_t s = 0; s < xi.size(); ++s) mean += inst.scenarios[s].probability * xi(s);
  double dev = 0.0;
  for (std::size_t s = 0; s < xi.size(); ++s) dev += inst.scenarios[s].probability * std::abs(xi(s) - mean);
  return dev;
}

std::string stage_name(int which) {
  switch (which) {
    case 1: return "z1";
    case 2: return "z2";
    case 3: return "z3";
  }
  return "combined";
}

std::string options_key(const SolveOptions& opt) {
  std::ostringstream os;
  os.precision(17);
  os << opt.model.zero_breakpoint << opt.model.per_echelon << opt.model.exclusive_echelon << '|'
     << opt.tol.feasibility_tol << '|' << opt.tol.optimality_tol << '|' << opt.tol.integrality_tol << '|'
     << opt.tol.rel_gap << '|' << opt.tol.abs_gap << '|' << opt.tol.node_limit;
  return os.str();
}

// Only the parameters that reach a stage's model enter its key.
std::string stage_key(const ProblemInstance& inst, int which, const SolveOptions& opt) {
  ProblemInstance k = inst;
  if (which != 1) k.robust.lambda1 = 0.0;
  if (which != 2) k.robust.lambda2 = 0.0;
  if (which == 3) k.robust.omega = 0.0;
  return std::to_string(which) + "|" + options_key(opt) + "|" + instance_to_json(k);
}

ObjectiveMode mode_of(int which) {
  switch (which) {
    case 1: return ObjectiveMode::cost_robust;
    case 2: return ObjectiveMode::emission_robust;
    case 3: return ObjectiveMode::quality;
  }
  throw std::invalid_argument("objective index must be 1, 2 or 3");
}

[[noreturn]] void raise_for(const std::string& stage, const MilpSolution& sol, const BuiltModel& built,
                            const ToleranceConfig& tol) {
  switch (sol.status) {
    case SolveStatus::infeasible: {
      auto rows = conflicting_rows(built.model, tol);
      std::string msg = "stage " + stage + " is infeasible";
      if (rows.empty()) {
        msg += " (the continuous relaxation is feasible; no binary assignment is)";
      } else {
        msg += "; conflicting rows:";
        for (const auto& r : rows) msg += " " + r;
      }
      throw ProcedureError(msg, sol.status, rows);
    }
    case SolveStatus::unbounded:
      throw ProcedureError("stage " + stage +
                               " is unbounded even with the boundedness guards; review the guard bounds",
                           sol.status);
    case SolveStatus::node_limit:
      throw ProcedureError("stage " + stage + " hit the node limit without a feasible solution", sol.status);
    default:
      throw ProcedureError("stage " + stage + " failed numerically", SolveStatus::numerical_failure);
  }
}

StageStats make_stats(const std::string& name, const MilpSolution& sol, double secs) {
  StageStats st;
  st.name = name;
  st.status = sol.status;
  st.objective = sol.objective;
  st.nodes = sol.stats.nodes;
  st.lp_iterations = sol.stats.lp_iterations;
  st.best_bound = sol.stats.best_bound;
  st.rel_gap = sol.stats.rel_gap;
  st.seconds = secs;
  return st;
}

double clean(double v) { return std::abs(v) < 1e-9 ? 0.0 : v; }

template <typename Arr, typename VArr>
void extract(Arr& out, const VArr& handles, const std::vector<double>& values) {
  out = Arr(handles.shape(), 0.0);
  for (std::size_t k = 0; k < handles.size(); ++k) out.flat()[k] = clean(values[handles.flat()[k]]);
}

}  // namespace

double SolveReport::total_infeasibility(const ProblemInstance& inst) const {
  double acc = 0.0;
  const auto& sh = delta_plus.shape();
  for (std::size_t i = 0; i < sh[0]; ++i)
    for (std::size_t j = 0; j < sh[1]; ++j)
      for (std::size_t t = 0; t < sh[2]; ++t)
        for (std::size_t s = 0; s < sh[3]; ++s)
          acc += inst.scenarios[s].probability * (delta_plus(i, j, t, s) + delta_minus(i, j, t, s));
  return acc;
}

double SolveReport::deviation1(const ProblemInstance& inst) const { return weighted_abs_deviation(inst, xi1); }
double SolveReport::deviation2(const ProblemInstance& inst) const { return weighted_abs_deviation(inst, xi2); }

double SolveReport::total_buy() const {
  double a = 0.0;
  for (double v : buy) a += v;
  return a;
}

double SolveReport::total_sell() const {
  double a = 0.0;
  for (double v : sell) a += v;
  return a;
}

bool StageCache::lookup(const std::string& key, IndividualResult& out) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return false;
  out = it->second;
  return true;
}

void StageCache::store(const std::string& key, const IndividualResult& r) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.emplace(key, r);
}

std::size_t StageCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::vector<std::string> conflicting_rows(const MilpModel& model, const ToleranceConfig& tol) {
  const auto& rows = model.constraints();
  auto feasible_with = [&](const std::vector<char>& keep) {
    MilpModel m;
    for (const auto& v : model.variables()) m.add_variable(v.name, v.lower, v.upper);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!keep[r]) continue;
      LinearExpr e;
      for (const auto& t : rows[r].terms) e.add(t.var, t.coef);
      m.add_constraint(rows[r].name, e, rows[r].sense, rows[r].rhs);
    }
    m.set_objective(LinearExpr(), ObjSense::minimize);
    return solve_lp(m, tol).status != SolveStatus::infeasible;
  };
  std::vector<char> keep(rows.size(), 1);
  if (feasible_with(keep)) return {};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    keep[r] = 0;
    if (feasible_with(keep)) keep[r] = 1;
  }
  std::vector<std::string> out;
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (keep[r]) out.push_back(rows[r].name);
  return out;
}

IndividualResult solve_individual(const ProblemInstance& inst, int which, const SolveOptions& opt,
                                  StageCache* cache) {
  const ObjectiveMode mode = mode_of(which);
  std::string key;
  if (cache) {
    key = stage_key(inst, which, opt);
    IndividualResult hit;
    if (cache->lookup(key, hit)) return hit;
  }
  const auto t0 = Clock::now();
  BuiltModel built = build_full_model(inst, mode, opt.model);
  MilpSolution sol = solve_milp(built.model, opt.tol);
  if (!sol.has_solution()) raise_for(stage_name(which), sol, built, opt.tol);
  IndividualResult res;
  res.optimum = sol.objective;
  res.stats = make_stats(stage_name(which), sol, seconds_since(t0));
  res.stats.active_guards = active_guards(inst, built, sol.values);
  res.solution = std::move(sol);
  if (cache) cache->store(key, res);
  return res;
}

SolveReport solve_combined(const ProblemInstance& inst, double z1_star, double z2_star, double z3_star,
                           const SolveOptions& opt) {
  const auto t0 = Clock::now();
  BuiltModel built = build_full_model(inst, ObjectiveMode::combined, opt.model, {z1_star, z2_star, z3_star});
  MilpSolution sol = solve_milp(built.model, opt.tol);
  if (!sol.has_solution()) raise_for("combined", sol, built, opt.tol);
  const auto& x = sol.values;
  const auto& v = built.vars;
  const std::size_t S = inst.dims.scenarios;

  SolveReport rep;
  rep.regime = inst.regime.kind;
  rep.z1_star = z1_star;
  rep.z2_star = z2_star;
  rep.z3_star = z3_star;
  rep.z1 = built.exprs.z1.evaluate(x);
  rep.z2 = built.exprs.z2.evaluate(x);
  rep.z3 = built.exprs.z3.evaluate(x);
  rep.z_total = sol.objective;
  extract(rep.x, v.x, x);
  extract(rep.r, v.r, x);
  extract(rep.b, v.b, x);
  extract(rep.buy, v.buy, x);
  extract(rep.sell, v.sell, x);
  extract(rep.q, v.q, x);
  extract(rep.W, v.W, x);
  extract(rep.delta_plus, v.delta_plus, x);
  extract(rep.delta_minus, v.delta_minus, x);
  extract(rep.theta1, v.theta1, x);
  extract(rep.theta2, v.theta2, x);
  rep.xi1 = Vec1({S});
  rep.xi2 = Vec1({S});
  for (std::size_t s = 0; s < S; ++s) {
    rep.xi1(s) = built.exprs.xi1[s].evaluate(x);
    rep.xi2(s) = built.exprs.xi2[s].evaluate(x);
  }
  const std::size_t T = inst.dims.periods;
  rep.sell_price = Vec1({T});
  rep.buy_price = Vec1({T});
  for (std::size_t t = 0; t < T; ++t) {
    rep.sell_price(t) = v.sell_revenue[t];
    rep.buy_price(t) = v.buy_cost[t];
  }
  rep.status = sol.status;
  StageStats st = make_stats("combined", sol, seconds_since(t0));
  st.active_guards = active_guards(inst, built, x);
  rep.stages.push_back(st);

  // Each objective can be no better than its own optimum. The slack follows
  // the gap the individual solves were allowed to stop at.
  auto slack = [&](double z) { return std::max(1e-6, opt.tol.rel_gap) * std::max(1.0, std::abs(z)); };
  if (opt.verify_sandwich &&
      (rep.z1 < z1_star - slack(z1_star) || rep.z2 < z2_star - slack(z2_star) || rep.z3 > z3_star + slack(z3_star))) {
    std::ostringstream os;
    os.precision(12);
    os << "combined solution beats an individual optimum (z1 " << rep.z1 << " vs " << z1_star << ", z2 " << rep.z2
       << " vs " << z2_star << ", z3 " << rep.z3 << " vs " << z3_star << ")";
    throw ProcedureError(os.str(), SolveStatus::numerical_failure);
  }
  return rep;
}

SolveReport full_solve(const ProblemInstance& inst, const SolveOptions& opt, StageCache* cache) {
  require_valid(inst);
  opt.model.validate();
  IndividualResult res[3];
  if (opt.workers > 1) {
    std::future<IndividualResult> fut[3];
    for (int w = 0; w < 3; ++w)
      fut[w] = std::async(std::launch::async, [&, w] { return solve_individual(inst, w + 1, opt, cache); });
    for (int w = 0; w < 3; ++w) res[w] = fut[w].get();
  } else {
    for (int w = 0; w < 3; ++w) res[w] = solve_individual(inst, w + 1, opt, cache);
  }
  SolveReport rep = solve_combined(inst, res[0].optimum, res[1].optimum, res[2].optimum, opt);
  StageStats combined = rep.stages.back();
  rep.stages = {res[0].stats, res[1].stats, res[2].stats, combined};
  // The worst stage status describes the run.
  for (const auto& st : rep.stages)
    if (st.status == SolveStatus::gap_limit) rep.status = SolveStatus::gap_limit;
  return rep;
}

namespace {

template <typename Arr>
nlohmann::ordered_json nested(const Arr& a) {
  const auto& sh = a.shape();
  const auto& flat = a.flat();
  std::size_t pos = 0;
  auto rec = [&](auto&& self, std::size_t axis) -> nlohmann::ordered_json {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < sh[axis]; ++k) {
      if (axis + 1 == sh.size()) {
        arr.push_back(flat[pos++]);
      } else {
        arr.push_back(self(self, axis + 1));
      }
    }
    return arr;
  };
  return rec(rec, 0);
}

}  // namespace

std::string report_to_json(const SolveReport& rep, bool include_timing) {
  nlohmann::ordered_json j;
  j["status"] = to_string(rep.status);
  j["regime"] = rep.regime == RegimeKind::cap_and_trade ? "cap_and_trade" : "penalty";
  j["z1_star"] = rep.z1_star;
  j["z2_star"] = rep.z2_star;
  j["z3_star"] = rep.z3_star;
  j["z1"] = rep.z1;
  j["z2"] = rep.z2;
  j["z3"] = rep.z3;
  j["z_total"] = rep.z_total;
  j["x"] = nested(rep.x);
  j["r"] = nested(rep.r);
  j["b"] = nested(rep.b);
  j["buy"] = nested(rep.buy);
  j["sell"] = nested(rep.sell);
  j["sell_price"] = nested(rep.sell_price);
  j["buy_price"] = nested(rep.buy_price);
  j["q"] = nested(rep.q);
  j["W"] = nested(rep.W);
  j["delta_plus"] = nested(rep.delta_plus);
  j["delta_minus"] = nested(rep.delta_minus);
  j["theta1"] = nested(rep.theta1);
  j["theta2"] = nested(rep.theta2);
  j["xi1"] = nested(rep.xi1);
  j["xi2"] = nested(rep.xi2);
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto& st : rep.stages) {
    nlohmann::ordered_json s;
    s["name"] = st.name;
    s["status"] = to_string(st.status);
    s["objective"] = st.objective;
    s["nodes"] = st.nodes;
    s["lp_iterations"] = st.lp_iterations;
    s["best_bound"] = st.best_bound;
    s["rel_gap"] = st.rel_gap;
    s["active_guards"] = st.active_guards;
    if (include_timing) s["seconds"] = st.seconds;
    stages.push_back(s);
  }
  j["stages"] = stages;
  nlohmann::ordered_json ov = nlohmann::ordered_json::object();
  for (const auto& [k, v] : rep.overrides) ov[k] = v;
  j["overrides"] = ov;
  return j.dump(1) + "\n";
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string report_to_csv(const SolveReport& rep) {
  std::ostringstream os;
  os << "family,i,j,t,k,n,s,value\n";
  auto scalar = [&](const char* name, double v) { os << name << ",,,,,,," << fmt(v) << "\n"; };
  scalar("z1_star", rep.z1_star);
  scalar("z2_star", rep.z2_star);
  scalar("z3_star", rep.z3_star);
  scalar("z1", rep.z1);
  scalar("z2", rep.z2);
  scalar("z3", rep.z3);
  scalar("z_total", rep.z_total);
  // Columns: i, j, t, k, n, s. `axes` names which column each array axis fills.
  auto family = [&](const char* name, const auto& arr, std::initializer_list<int> axes) {
    const auto& sh = arr.shape();
    const std::vector<int> ax(axes);
    std::vector<std::size_t> ix(sh.size(), 0);
    for (std::size_t f = 0; f < arr.size(); ++f) {
      std::size_t rem = f;
      for (std::size_t a = sh.size(); a-- > 0;) {
        ix[a] = rem % sh[a];
        rem /= sh[a];
      }
      std::string cols[6];
      for (std::size_t a = 0; a < ax.size(); ++a) cols[ax[a]] = std::to_string(ix[a]);
      os << name;
      for (const auto& c : cols) os << ',' << c;
      os << ',' << fmt(arr.flat()[f]) << "\n";
    }
  };
  family("x", rep.x, {0, 1, 2});
  family("r", rep.r, {0, 2});
  family("b", rep.b, {0, 2});
  family("buy", rep.buy, {2});
  family("sell", rep.sell, {2});
  family("sell_price", rep.sell_price, {2});
  family("buy_price", rep.buy_price, {2});
  family("q", rep.q, {1, 2, 3, 4});
  family("W", rep.W, {1, 2, 3, 4});
  family("delta_plus", rep.delta_plus, {0, 1, 2, 5});
  family("delta_minus", rep.delta_minus, {0, 1, 2, 5});
  family("theta1", rep.theta1, {5});
  family("theta2", rep.theta2, {5});
  family("xi1", rep.xi1, {5});
  family("xi2", rep.xi2, {5});
  return os.str();
}

std::string stage_timing_summary(const SolveReport& rep) {
  std::ostringstream os;
  char buf[200];
  for (const auto& st : rep.stages) {
    std::snprintf(buf, sizeof buf, "%-9s %-10s obj %.10g  nodes %zu  lp_iters %zu  gap %.2e  %.2fs\n", st.name.c_str(),
                  to_string(st.status), st.objective, st.nodes, st.lp_iterations, st.rel_gap, st.seconds);
    os << buf;
  }
  return os.str();
}

}  // namespace gss
