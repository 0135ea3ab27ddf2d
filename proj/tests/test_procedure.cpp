#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <vector>

#include "audit.hpp"
#include "fixtures.hpp"
#include "gss/procedure.hpp"

using namespace gss;

namespace {

// Closed-form oracle for one product, supplier, period, truck type and
// scenario. Transport is fixed there: the idle and the loaded echelon both sit
// on the first load segment. For a given order x the remaining choices split
// into "cover the stock imbalance" and "settle the emission position", each a
// greedy fill over priced options. The order is scanned on a fine grid.
struct CellOracle {
  const ProblemInstance& inst;
  double gain, cost_x, em_x, score_x, transport, em_fixed, demand, max_x, depth, cap, bp, sp;

  explicit CellOracle(const ProblemInstance& in) : inst(in) {
    const auto& sc = in.scenarios[0];
    const auto& p = in.det;
    const double e = sc.reject_rate(0, 0), c = sc.collect_rate(0, 0);
    const double u = sc.usable_rejected(0, 0), v = sc.reusable_collected(0, 0);
    gain = 1 + u * e + v * c;
    cost_x = sc.delay_days(0, 0) * p.delay_penalty(0, 0, 0) + e * p.reject_loss(0, 0, 0) +
             sc.purchase_cost(0, 0, 0) + (e + c) * p.disassembly_cost(0, 0) +
             (e * u + c * v) * p.remanufacture_cost(0, 0) + (e * (1 - u) + c * (1 - v)) * p.disposal_cost(0, 0);
    em_x = p.production_emission(0, 0, 0) + (e * u + c * v) * p.remanufacture_emission(0, 0);
    score_x = p.score_em(0, 0, 0) + p.score_gp(0, 0, 0) + p.score_re(0, 0, 0) + p.score_pt(0, 0, 0);
    transport = p.transport_cost(0, 0, 0, 0) + p.transport_cost(0, 0, 0, 1);
    em_fixed = p.distance(0) * p.transport_emission(0, 0, 0, 1);
    demand = sc.demand(0, 0);
    max_x = p.truck_breakpoints(0);
    depth = in.robust.market_depth_bound;
    cap = p.emission_cap(0);
    bp = *std::min_element(p.seller_offers.begin(), p.seller_offers.end());
    sp = *std::max_element(p.buyer_offers.begin(), p.buyer_offers.end());
  }

  struct Option {
    double unit, limit;
  };

  // Cheapest cover of `amount` with bounded options; NaN when impossible.
  static double fill(double amount, std::vector<Option> opts) {
    std::sort(opts.begin(), opts.end(), [](const Option& a, const Option& b) { return a.unit < b.unit; });
    double cost = 0;
    for (const auto& o : opts) {
      const double take = std::min(amount, o.limit);
      cost += take * o.unit;
      amount -= take;
    }
    return amount > 1e-9 ? std::nan("") : cost;
  }

  // Weighted objective w1*z1 + w2*z2 - w3*z3 at order x, minimised over the
  // remaining variables. Returns NaN if x is infeasible.
  double value(double x, double w1, double w2, double w3) const {
    const double omega = inst.robust.omega;
    const auto& p = inst.det;
    const double g = gain * x - demand;
    double stock;
    if (g >= 0) {
      stock = fill(g, {{w1 * p.holding_cost(0, 0), demand}, {(w1 + w2) * omega, demand}});
    } else {
      stock = fill(-g, {{w1 * p.backorder_cost(0, 0), demand}, {(w1 + w2) * omega, demand}});
    }
    const double slack = cap - (em_fixed + em_x * x);
    double trade;
    if (slack >= 0) {
      trade = -w1 * sp * std::min(slack, depth);
      if (w1 * sp <= 0) trade = 0;
    } else {
      if (-slack > depth + 1e-9) return std::nan("");
      trade = w1 * bp * -slack;
    }
    return w1 * (cost_x * x + transport) + w2 * (em_fixed + em_x * x) - w3 * score_x * x + stock + trade;
  }

  // Minimum over the grid and the resolution bound for that minimum.
  std::pair<double, double> minimise(double w1, double w2, double w3, int steps = 200000) const {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= steps; ++k) {
      const double v = value(max_x * k / steps, w1, w2, w3);
      if (std::isfinite(v)) best = std::min(best, v);
    }
    const double omega = inst.robust.omega;
    const double slope = std::abs(w1) * (cost_x + gain * std::max({inst.det.holding_cost(0, 0),
                                                                     inst.det.backorder_cost(0, 0), omega}) +
                                         std::max(bp, sp) * em_x) +
                         std::abs(w2) * (em_x + gain * omega) + std::abs(w3) * score_x;
    return {best, slope * max_x / steps + 1e-9};
  }
};

ProblemInstance tiny(std::uint64_t seed) {
  auto inst = small_instance(seed, 1, 1, 1, 1, 1);
  inst.det.truck_breakpoints(0) = 6000;
  return inst;
}

}  // namespace

TEST_CASE("procedure: null scores give zero quality optimum") {
  auto inst = small_instance(2, 2, 2, 2, 2, 2);
  for (auto* a : {&inst.det.score_em, &inst.det.score_gp, &inst.det.score_re, &inst.det.score_pt})
    std::fill(a->begin(), a->end(), 0.0);
  const auto r = solve_individual(inst, 3);
  CHECK(r.optimum == 0.0);
  CHECK(r.stats.status == SolveStatus::optimal);
}

TEST_CASE("procedure: degenerate robustness matches the expected-value model") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto inst = small_instance(seed, 2, 2, 2, 2, 2);
    inst.robust.lambda1 = inst.robust.lambda2 = inst.robust.omega = 0.0;
    const auto robust = solve_individual(inst, 1);

    MilpModel ev;
    const auto vars = create_variables(inst, {}, ev);
    add_core_constraints(inst, {}, vars, ev);
    LinearExpr obj;
    for (std::size_t s = 0; s < 2; ++s) obj.add(build_scenario_cost(inst, s, vars), inst.scenarios[s].probability);
    ev.set_objective(obj, ObjSense::minimize);
    const auto sol = solve_milp(ev);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(std::abs(robust.optimum - sol.objective) <= 1e-6 * std::max(1.0, std::abs(sol.objective)));
  }
}

TEST_CASE("procedure: single-cell optima match the closed-form grid oracle") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto inst = tiny(seed);
    // Vary which side of the cap and of demand the optimum lands on.
    inst.det.emission_cap(0) = seed % 2 ? 40.0 : 5.0;
    inst.robust.omega = seed % 3 == 0 ? 20.0 : 50.0;
    const CellOracle oc(inst);
    INFO("seed " << seed);

    const auto z1 = solve_individual(inst, 1);
    const auto [o1, tol1] = oc.minimise(1, 0, 0);
    CHECK(std::abs(z1.optimum - o1) <= tol1 + 1e-6 * std::abs(o1));

    const auto z2 = solve_individual(inst, 2);
    const auto [o2, tol2] = oc.minimise(0, 1, 0);
    CHECK(std::abs(z2.optimum - o2) <= tol2 + 1e-6 * std::abs(o2));

    const auto z3 = solve_individual(inst, 3);
    const auto [o3, tol3] = oc.minimise(0, 0, 1);
    CHECK(std::abs(z3.optimum + o3) <= tol3 + 1e-6 * std::abs(o3));

    const auto rep = solve_combined(inst, z1.optimum, z2.optimum, z3.optimum);
    const double a1 = 1 / std::abs(z1.optimum), a2 = 1 / std::abs(z2.optimum), a3 = 1 / std::abs(z3.optimum);
    auto [oc_total, tolc] = oc.minimise(a1, a2, a3);
    oc_total += -z1.optimum * a1 - z2.optimum * a2 + z3.optimum * a3;
    CHECK(std::abs(rep.z_total - oc_total) <= tolc + 1e-6);
  }
}

TEST_CASE("procedure: coincident optimum gives zero total") {
  auto inst = null_instance(dims_of(1, 1, 1, 1, 1));
  inst.det.truck_breakpoints(0) = 1000;
  inst.scenarios[0].demand(0, 0) = 1000;
  inst.det.transport_cost(0, 0, 0, 0) = 30;
  inst.det.transport_cost(0, 0, 0, 1) = 31;
  inst.det.transport_emission(0, 0, 0, 1) = 0.4;
  inst.det.distance(0) = 5;
  inst.det.emission_cap(0) = 100;
  inst.det.score_em(0, 0, 0) = 3;
  inst.robust.omega = 0;
  const auto rep = full_solve(inst);
  CHECK(rep.z1_star == doctest::Approx(61));
  CHECK(rep.z2_star == doctest::Approx(2));
  CHECK(rep.z3_star == doctest::Approx(3000));
  CHECK(std::abs(rep.z_total) <= 1e-9);
}

TEST_CASE("procedure: zero reference optimum is a normalisation error") {
  const auto inst = small_instance(1, 1, 1, 1, 1, 1);
  CHECK_THROWS_WITH_AS(solve_combined(inst, 0.0, 1.0, 1.0), doctest::Contains("shift"), NormalizationError);
}

TEST_CASE("procedure: sandwich and non-negative total") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto inst = small_instance(seed, 2, 2, 2, 2, 3);
    const auto rep = full_solve(inst);
    const auto tol = [](double z) { return 1e-6 * std::max(1.0, std::abs(z)); };
    CHECK(rep.z1 >= rep.z1_star - tol(rep.z1_star));
    CHECK(rep.z2 >= rep.z2_star - tol(rep.z2_star));
    CHECK(rep.z3 <= rep.z3_star + tol(rep.z3_star));
    CHECK(rep.z_total >= -1e-9);
    const auto a = audit_report(inst, rep);
    INFO(a.worst);
    CHECK(a.balance <= 1e-6);
    CHECK(a.cap <= 1e-6);
  }
}

TEST_CASE("procedure: default-size report shape") {
  const auto inst = generate_instance(GeneratorConfig{.seed = 1});
  const auto rep = full_solve(inst);
  CHECK(rep.status == SolveStatus::optimal);
  CHECK(rep.x.shape() == Arr3::Shape{4, 5, 4});
  CHECK(rep.r.shape() == Arr2::Shape{4, 4});
  CHECK(rep.b.shape() == Arr2::Shape{4, 4});
  CHECK(rep.buy.size() == 4);
  CHECK(rep.sell.size() == 4);
  CHECK(rep.delta_plus.shape() == Arr4::Shape{4, 5, 4, 3});
  CHECK(rep.delta_minus.shape() == Arr4::Shape{4, 5, 4, 3});
  CHECK(rep.q.shape() == Arr4::Shape{5, 4, 4, 2});
  REQUIRE(rep.stages.size() == 4);
  CHECK(rep.stages[0].name == "z1");
  CHECK(rep.stages[3].name == "combined");
  for (double v : rep.x) CHECK(v >= 0);
  for (double v : rep.q) CHECK((v == 0.0 || v == 1.0));
  // Every (j, t, n) block uses exactly one selector and weights summing to one.
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t t = 0; t < 4; ++t)
      for (std::size_t n = 0; n < 2; ++n) {
        double sq = 0, sw = 0;
        for (std::size_t k = 0; k < 4; ++k) {
          sq += rep.q(j, t, k, n);
          sw += rep.W(j, t, k, n);
        }
        CHECK(sq == doctest::Approx(1));
        CHECK(sw == doctest::Approx(1));
      }
  const auto a = audit_report(inst, rep);
  CHECK(a.balance <= 1e-6);
  CHECK(a.cap <= 1e-6);
}

TEST_CASE("procedure: repeated runs give identical bytes") {
  const auto inst = small_instance(9, 2, 3, 2, 2, 3);
  SolveOptions serial;
  SolveOptions parallel;
  parallel.workers = 3;
  const auto a = report_to_json(full_solve(inst, serial));
  const auto b = report_to_json(full_solve(inst, serial));
  const auto c = report_to_json(full_solve(inst, parallel));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(report_to_csv(full_solve(inst, serial)) == report_to_csv(full_solve(inst, parallel)));
}

TEST_CASE("procedure: stage cache reuses unaffected stages") {
  auto inst = small_instance(3, 2, 2, 2, 2, 2);
  StageCache cache;
  const auto first = full_solve(inst, {}, &cache);
  CHECK(cache.size() == 3);
  inst.robust.lambda1 = 3.0;
  const auto cached = full_solve(inst, {}, &cache);
  CHECK(cache.size() == 4);  // only the cost stage depends on lambda1
  const auto fresh = full_solve(inst);
  CHECK(report_to_json(cached) == report_to_json(fresh));
  (void)first;
}

TEST_CASE("procedure: infeasible stage names conflicting rows") {
  auto inst = small_instance(1, 1, 1, 1, 1, 1);
  inst.det.distance(0) = 1e6;  // buyer-echelon trucks alone exceed the cap
  inst.det.emission_cap(0) = 0;
  inst.robust.market_depth_bound = 1;
  try {
    solve_individual(inst, 1);
    FAIL("expected an infeasible stage");
  } catch (const ProcedureError& e) {
    CHECK(e.status() == SolveStatus::infeasible);
    const auto& rows = e.conflicting_rows();
    REQUIRE_FALSE(rows.empty());
    CHECK(std::any_of(rows.begin(), rows.end(), [](const std::string& r) { return r.rfind("cap[", 0) == 0; }));
  }
}

TEST_CASE("procedure: conflicting rows are irreducible") {
  MilpModel m;
  const VarId x = m.add_variable("x", 0, kInf);
  const VarId y = m.add_variable("y", 0, kInf);
  m.add_constraint("a", LinearExpr().add(x, 1), RowSense::ge, 5);
  m.add_constraint("b", LinearExpr().add(y, 1), RowSense::le, 3);
  m.add_constraint("c", LinearExpr().add(x, 1).add(y, 1), RowSense::le, 4);
  m.add_constraint("d", LinearExpr().add(y, 1), RowSense::ge, 0);
  const auto rows = conflicting_rows(m);
  CHECK(rows == std::vector<std::string>{"a", "c"});
  m.add_constraint("e", LinearExpr().add(x, -1), RowSense::ge, -100);
  CHECK(conflicting_rows(MilpModel{}).empty());
}

TEST_CASE("procedure: report serialisation") {
  const auto inst = small_instance(4, 1, 2, 2, 1, 2);
  auto rep = full_solve(inst);
  rep.overrides["omega"] = 12.0;
  const auto j = nlohmann::json::parse(report_to_json(rep));
  CHECK(j["status"] == "optimal");
  CHECK(j["regime"] == "cap_and_trade");
  CHECK(j["overrides"]["omega"] == 12.0);
  CHECK(j["x"].size() == 1);
  CHECK(j["x"][0].size() == 2);
  CHECK(j["x"][0][0].size() == 2);
  CHECK_FALSE(j["stages"][0].contains("seconds"));
  CHECK(nlohmann::json::parse(report_to_json(rep, true))["stages"][0].contains("seconds"));

  const auto csv = report_to_csv(rep);
  CHECK(csv.rfind("family,i,j,t,k,n,s,value\n", 0) == 0);
  CHECK(csv.find("\nz_total,,,,,,,") != std::string::npos);
  CHECK(csv.find("\nx,0,1,1,,,,") != std::string::npos);
  CHECK(csv.find("\ndelta_plus,0,1,1,,,1,") != std::string::npos);
  CHECK(csv.find("\nq,,1,1,1,1,,") != std::string::npos);
  const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  const std::size_t expected = 1 + 7 + 4 + 2 + 2 + 2 + 2 + 2 + 2 + 16 + 16 + 8 + 8 + 2 + 2 + 2 + 2;
  CHECK(lines == expected);
}
