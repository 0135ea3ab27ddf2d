#include "gss/domain.hpp"

#include <cmath>
#include <sstream>

namespace gss {

ProblemInstance make_empty_instance(const Dimensions& dims) {
  const auto I = dims.products, J = dims.suppliers, T = dims.periods;
  const auto K = dims.truck_types, M = dims.market_offers;
  ProblemInstance inst;
  inst.dims = dims;
  inst.scenarios.resize(dims.scenarios);
  for (auto& sc : inst.scenarios) {
    sc.purchase_cost = Arr3({I, J, T});
    sc.delay_days = Arr2({J, T});
    sc.reject_rate = Arr2({I, T});
    sc.collect_rate = Arr2({I, T});
    sc.usable_rejected = Arr2({I, T});
    sc.reusable_collected = Arr2({I, T});
    sc.demand = Arr2({I, T});
  }
  auto& d = inst.det;
  d.holding_cost = Arr2({I, T});
  d.backorder_cost = Arr2({I, T});
  d.delay_penalty = Arr3({I, J, T});
  d.reject_loss = Arr3({I, J, T});
  d.seller_offers = Arr2({T, M});
  d.buyer_offers = Arr2({T, M});
  d.disassembly_cost = Arr2({I, T});
  d.remanufacture_cost = Arr2({I, T});
  d.disposal_cost = Arr2({I, T});
  d.transport_cost = Arr4({J, T, K, kEchelons});
  d.distance = Vec1({J});
  d.transport_emission = Arr4({J, T, K, kEchelons});
  d.production_emission = Arr3({I, J, T});
  d.remanufacture_emission = Arr2({I, T});
  d.score_em = Arr3({I, J, T});
  d.score_gp = Arr3({I, J, T});
  d.score_re = Arr3({I, J, T});
  d.score_pt = Arr3({I, J, T});
  d.emission_cap = Vec1({T});
  d.truck_breakpoints = Vec1({K});
  return inst;
}

std::string ValidationReport::summary() const {
  if (violations.empty()) return "valid";
  std::ostringstream os;
  for (std::size_t n = 0; n < violations.size(); ++n) {
    if (n) os << "; ";
    os << violations[n].field << ": " << violations[n].message;
  }
  return os.str();
}

namespace {

class Checker {
 public:
  explicit Checker(ValidationReport& out) : out_(out) {}

  void fail(std::string field, std::string message) {
    out_.violations.push_back({std::move(field), std::move(message)});
  }

  template <typename A>
  bool shape(const std::string& field, const A& arr, const typename A::Shape& want) {
    if (arr.shape() != want || arr.size() != A::count(want)) {
      fail(field, "dimension mismatch");
      return false;
    }
    return true;
  }

  template <typename A>
  void range(const std::string& field, const A& arr, double lo, double hi) {
    for (double v : arr) {
      if (!std::isfinite(v) || v < lo || v > hi) {
        std::ostringstream os;
        os << "value " << v << " outside [" << lo << ", " << hi << "]";
        fail(field, os.str());
        return;
      }
    }
  }

  template <typename A>
  void nonneg(const std::string& field, const A& arr) {
    range(field, arr, 0.0, HUGE_VAL);
  }

 private:
  ValidationReport& out_;
};

}  // namespace

ValidationReport validate_instance(const ProblemInstance& inst) {
  ValidationReport rep;
  Checker ck(rep);
  const auto& dm = inst.dims;
  if (dm.products < 1 || dm.suppliers < 1 || dm.periods < 1 || dm.truck_types < 1 ||
      dm.scenarios < 1 || dm.market_offers < 1) {
    ck.fail("dims", "all counts must be >= 1");
    return rep;
  }
  const auto I = dm.products, J = dm.suppliers, T = dm.periods;
  const auto K = dm.truck_types, M = dm.market_offers;

  if (inst.scenarios.size() != dm.scenarios) {
    ck.fail("scenarios", "expected " + std::to_string(dm.scenarios) + " scenarios, got " +
                             std::to_string(inst.scenarios.size()));
  }

  double prob_sum = 0.0;
  for (std::size_t s = 0; s < inst.scenarios.size(); ++s) {
    const auto& sc = inst.scenarios[s];
    const std::string p = "scenarios[" + std::to_string(s) + "].";
    if (!std::isfinite(sc.probability) || sc.probability < 0.0 || sc.probability > 1.0) {
      ck.fail(p + "probability", "must lie in [0, 1]");
    }
    prob_sum += sc.probability;
    if (ck.shape(p + "purchase_cost", sc.purchase_cost, {I, J, T}))
      ck.nonneg(p + "purchase_cost", sc.purchase_cost);
    if (ck.shape(p + "delay_days", sc.delay_days, {J, T})) ck.nonneg(p + "delay_days", sc.delay_days);
    for (auto [name, arr] : {std::pair{"reject_rate", &sc.reject_rate},
                             std::pair{"collect_rate", &sc.collect_rate},
                             std::pair{"usable_rejected", &sc.usable_rejected},
                             std::pair{"reusable_collected", &sc.reusable_collected}}) {
      if (ck.shape(p + name, *arr, {I, T})) ck.range(p + name, *arr, 0.0, 1.0);
    }
    if (ck.shape(p + "demand", sc.demand, {I, T})) ck.nonneg(p + "demand", sc.demand);
  }
  if (std::abs(prob_sum - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "probabilities sum to " << prob_sum;
    ck.fail("scenarios.probability", os.str());
  }

  const auto& d = inst.det;
  if (!std::isfinite(d.interest_rate) || d.interest_rate < 0.0) ck.fail("det.interest_rate", "must be >= 0");
  for (auto [name, arr] : {std::pair{"holding_cost", &d.holding_cost},
                           std::pair{"backorder_cost", &d.backorder_cost},
                           std::pair{"disassembly_cost", &d.disassembly_cost},
                           std::pair{"remanufacture_cost", &d.remanufacture_cost},
                           std::pair{"disposal_cost", &d.disposal_cost},
                           std::pair{"remanufacture_emission", &d.remanufacture_emission}}) {
    if (ck.shape(std::string("det.") + name, *arr, {I, T})) ck.nonneg(std::string("det.") + name, *arr);
  }
  for (auto [name, arr] : {std::pair{"delay_penalty", &d.delay_penalty},
                           std::pair{"reject_loss", &d.reject_loss},
                           std::pair{"production_emission", &d.production_emission}}) {
    if (ck.shape(std::string("det.") + name, *arr, {I, J, T})) ck.nonneg(std::string("det.") + name, *arr);
  }
  for (auto [name, arr] : {std::pair{"score_em", &d.score_em}, std::pair{"score_gp", &d.score_gp},
                           std::pair{"score_re", &d.score_re}, std::pair{"score_pt", &d.score_pt}}) {
    if (ck.shape(std::string("det.") + name, *arr, {I, J, T})) ck.range(std::string("det.") + name, *arr, 0.0, 10.0);
  }
  for (auto [name, arr] : {std::pair{"seller_offers", &d.seller_offers},
                           std::pair{"buyer_offers", &d.buyer_offers}}) {
    if (ck.shape(std::string("det.") + name, *arr, {T, M})) ck.nonneg(std::string("det.") + name, *arr);
  }
  for (auto [name, arr] : {std::pair{"transport_cost", &d.transport_cost},
                           std::pair{"transport_emission", &d.transport_emission}}) {
    if (ck.shape(std::string("det.") + name, *arr, {J, T, K, kEchelons}))
      ck.nonneg(std::string("det.") + name, *arr);
  }
  if (ck.shape("det.distance", d.distance, {J})) ck.nonneg("det.distance", d.distance);
  if (ck.shape("det.emission_cap", d.emission_cap, {T})) ck.nonneg("det.emission_cap", d.emission_cap);
  if (ck.shape("det.truck_breakpoints", d.truck_breakpoints, {K})) {
    ck.nonneg("det.truck_breakpoints", d.truck_breakpoints);
    for (std::size_t k = 1; k < K; ++k) {
      if (!(d.truck_breakpoints(k) > d.truck_breakpoints(k - 1))) {
        ck.fail("det.truck_breakpoints", "breakpoints not increasing");
        break;
      }
    }
  }

  const auto& r = inst.robust;
  if (!(r.lambda1 >= 0.0) || !std::isfinite(r.lambda1)) ck.fail("robust.lambda1", "must be >= 0");
  if (!(r.lambda2 >= 0.0) || !std::isfinite(r.lambda2)) ck.fail("robust.lambda2", "must be >= 0");
  if (!(r.omega >= 0.0) || !std::isfinite(r.omega)) ck.fail("robust.omega", "must be >= 0");
  if (!(r.market_depth_bound > 0.0) || !std::isfinite(r.market_depth_bound))
    ck.fail("robust.market_depth_bound", "must be > 0");

  if (inst.regime.penalty_rate && !(*inst.regime.penalty_rate >= 0.0))
    ck.fail("regime.penalty_rate", "must be >= 0");
  return rep;
}

void require_valid(const ProblemInstance& inst) {
  auto rep = validate_instance(inst);
  if (!rep.ok()) throw DataError("invalid instance: " + rep.summary());
}

}  // namespace gss
