#include "gss/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gss {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

// mt19937_64 output is fully specified by the standard; the mapping to [0,1)
// uses the top 53 bits so the stream is identical on every platform.
class PortableUniform {
 public:
  explicit PortableUniform(std::uint64_t seed) : engine_(seed) {}

  double operator()(const UniformRange& r) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return r.low + (r.high - r.low) * u;
  }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
std::vector<T> resize_repeat(std::vector<T> v, std::size_t n) {
  if (v.empty()) return v;
  const T last = v.back();
  v.resize(n, last);
  return v;
}

void check_range(const std::string& name, const UniformRange& r) {
  if (!std::isfinite(r.low) || !std::isfinite(r.high)) throw ConfigError(name + ": bounds must be finite");
  if (r.low > r.high) {
    std::ostringstream os;
    os << name << ": low " << r.low << " > high " << r.high;
    throw ConfigError(os.str());
  }
}

void check_list(const std::string& name, const std::vector<UniformRange>& v, std::size_t need) {
  if (v.size() < need) {
    throw ConfigError(name + ": needs " + std::to_string(need) + " ranges, got " + std::to_string(v.size()));
  }
  for (std::size_t n = 0; n < v.size(); ++n) check_range(name + "[" + std::to_string(n) + "]", v[n]);
}

}  // namespace

GeneratorConfig GeneratorConfig::for_dims(const Dimensions& dims, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.dims = dims;
  const auto S = dims.scenarios, K = dims.truck_types;
  if (S != 3) cfg.probabilities.assign(S, 1.0 / static_cast<double>(S));
  for (auto* v : {&cfg.purchase_cost, &cfg.delay_days, &cfg.reject_rate, &cfg.collect_rate,
                  &cfg.usable_rejected, &cfg.reusable_collected, &cfg.demand}) {
    *v = resize_repeat(*v, S);
  }
  cfg.transport_cost = resize_repeat(cfg.transport_cost, K);
  cfg.transport_emission = resize_repeat(cfg.transport_emission, K);
  auto& bp = cfg.truck_breakpoints;
  while (bp.size() < K) bp.push_back(bp.back() * 2.0);
  bp.resize(K);
  return cfg;
}

void validate_config(const GeneratorConfig& cfg) {
  const auto& dm = cfg.dims;
  if (dm.products < 1 || dm.suppliers < 1 || dm.periods < 1 || dm.truck_types < 1 || dm.scenarios < 1 ||
      dm.market_offers < 1) {
    throw ConfigError("dims: all counts must be >= 1");
  }
  const auto S = dm.scenarios, K = dm.truck_types;
  if (cfg.probabilities.size() != S) throw ConfigError("probabilities: needs one entry per scenario");
  double sum = 0.0;
  for (double p : cfg.probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("probabilities: entries must lie in [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("probabilities: must sum to 1");
  if (cfg.truck_breakpoints.size() != K) throw ConfigError("truck_breakpoints: needs one entry per truck type");
  for (std::size_t k = 1; k < K; ++k) {
    if (!(cfg.truck_breakpoints[k] > cfg.truck_breakpoints[k - 1]))
      throw ConfigError("truck_breakpoints: must be strictly increasing");
  }
  if (!(cfg.interest_rate >= 0.0)) throw ConfigError("interest_rate: must be >= 0");
  if (!(cfg.lambda1 >= 0.0)) throw ConfigError("lambda1: must be >= 0");
  if (!(cfg.lambda2 >= 0.0)) throw ConfigError("lambda2: must be >= 0");
  if (!(cfg.omega >= 0.0)) throw ConfigError("omega: must be >= 0");
  if (!(cfg.market_depth_bound > 0.0)) throw ConfigError("market_depth_bound: must be > 0");

  check_list("purchase_cost", cfg.purchase_cost, S);
  check_range("holding_cost", cfg.holding_cost);
  check_range("backorder_cost", cfg.backorder_cost);
  check_list("delay_days", cfg.delay_days, S);
  check_range("delay_penalty", cfg.delay_penalty);
  check_list("reject_rate", cfg.reject_rate, S);
  check_list("collect_rate", cfg.collect_rate, S);
  check_list("usable_rejected", cfg.usable_rejected, S);
  check_list("reusable_collected", cfg.reusable_collected, S);
  check_range("reject_loss", cfg.reject_loss);
  check_range("seller_offers", cfg.seller_offers);
  check_range("buyer_offers", cfg.buyer_offers);
  check_range("disassembly_cost", cfg.disassembly_cost);
  check_range("remanufacture_cost", cfg.remanufacture_cost);
  check_range("disposal_cost", cfg.disposal_cost);
  if (cfg.transport_cost.size() < K) throw ConfigError("transport_cost: needs one entry per truck type");
  for (std::size_t k = 0; k < cfg.transport_cost.size(); ++k) {
    check_list("transport_cost[" + std::to_string(k) + "]", cfg.transport_cost[k], kEchelons);
  }
  check_list("demand", cfg.demand, S);
  check_range("distance", cfg.distance);
  check_list("transport_emission", cfg.transport_emission, K);
  check_range("production_emission", cfg.production_emission);
  check_range("remanufacture_emission", cfg.remanufacture_emission);
  check_range("score_em", cfg.score_em);
  check_range("score_gp", cfg.score_gp);
  check_range("score_re", cfg.score_re);
  check_range("score_pt", cfg.score_pt);
  check_range("emission_cap", cfg.emission_cap);

  // Rates must stay fractions and scores on the 0-10 scale, or the generated
  // instance would fail validation.
  auto fraction = [](const std::string& name, const std::vector<UniformRange>& v) {
    for (const auto& r : v)
      if (r.low < 0.0 || r.high > 1.0) throw ConfigError(name + ": range must lie within [0, 1]");
  };
  fraction("reject_rate", cfg.reject_rate);
  fraction("collect_rate", cfg.collect_rate);
  fraction("usable_rejected", cfg.usable_rejected);
  fraction("reusable_collected", cfg.reusable_collected);
  for (auto [name, r] : {std::pair{"score_em", cfg.score_em}, std::pair{"score_gp", cfg.score_gp},
                         std::pair{"score_re", cfg.score_re}, std::pair{"score_pt", cfg.score_pt}}) {
    if (r.low < 0.0 || r.high > 10.0) throw ConfigError(std::string(name) + ": range must lie within [0, 10]");
  }
}

ProblemInstance generate_instance(const GeneratorConfig& cfg) {
  validate_config(cfg);
  const auto& dm = cfg.dims;
  const auto I = dm.products, J = dm.suppliers, T = dm.periods;
  const auto K = dm.truck_types, S = dm.scenarios, M = dm.market_offers;

  ProblemInstance inst = make_empty_instance(dm);
  inst.robust = {cfg.lambda1, cfg.lambda2, cfg.omega, cfg.market_depth_bound};
  auto& d = inst.det;
  auto& sc = inst.scenarios;
  d.interest_rate = cfg.interest_rate;
  for (std::size_t s = 0; s < S; ++s) sc[s].probability = cfg.probabilities[s];
  for (std::size_t k = 0; k < K; ++k) d.truck_breakpoints(k) = cfg.truck_breakpoints[k];

  // Stream order: Table-2 row order, indices row-major in [i][j][t][k][n][s][m].
  PortableUniform draw(cfg.seed);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t s = 0; s < S; ++s) sc[s].purchase_cost(i, j, 0) = draw(cfg.purchase_cost[s]);
  for (std::size_t i = 0; i < I; ++i) d.holding_cost(i, 0) = draw(cfg.holding_cost);
  for (std::size_t i = 0; i < I; ++i) d.backorder_cost(i, 0) = draw(cfg.backorder_cost);
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t s = 0; s < S; ++s) sc[s].delay_days(j, t) = draw(cfg.delay_days[s]);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j) d.delay_penalty(i, j, 0) = draw(cfg.delay_penalty);
  auto per_scenario_it = [&](Arr2 ScenarioData::*field, const std::vector<UniformRange>& ranges) {
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t t = 0; t < T; ++t)
        for (std::size_t s = 0; s < S; ++s) (sc[s].*field)(i, t) = draw(ranges[s]);
  };
  per_scenario_it(&ScenarioData::reject_rate, cfg.reject_rate);
  per_scenario_it(&ScenarioData::collect_rate, cfg.collect_rate);
  per_scenario_it(&ScenarioData::usable_rejected, cfg.usable_rejected);
  per_scenario_it(&ScenarioData::reusable_collected, cfg.reusable_collected);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j) d.reject_loss(i, j, 0) = draw(cfg.reject_loss);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t m = 0; m < M; ++m) d.seller_offers(t, m) = draw(cfg.seller_offers);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t m = 0; m < M; ++m) d.buyer_offers(t, m) = draw(cfg.buyer_offers);
  for (std::size_t i = 0; i < I; ++i) d.disassembly_cost(i, 0) = draw(cfg.disassembly_cost);
  for (std::size_t i = 0; i < I; ++i) d.remanufacture_cost(i, 0) = draw(cfg.remanufacture_cost);
  for (std::size_t i = 0; i < I; ++i) d.disposal_cost(i, 0) = draw(cfg.disposal_cost);
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t n = 0; n < kEchelons; ++n) d.transport_cost(j, 0, k, n) = draw(cfg.transport_cost[k][n]);
  per_scenario_it(&ScenarioData::demand, cfg.demand);
  for (std::size_t j = 0; j < J; ++j) d.distance(j) = draw(cfg.distance);
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t n = 0; n < kEchelons; ++n) d.transport_emission(j, t, k, n) = draw(cfg.transport_emission[k]);
  auto ijt = [&](Arr3& arr, const UniformRange& r) {
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < J; ++j)
        for (std::size_t t = 0; t < T; ++t) arr(i, j, t) = draw(r);
  };
  ijt(d.production_emission, cfg.production_emission);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t t = 0; t < T; ++t) d.remanufacture_emission(i, t) = draw(cfg.remanufacture_emission);
  ijt(d.score_em, cfg.score_em);
  ijt(d.score_gp, cfg.score_gp);
  ijt(d.score_re, cfg.score_re);
  ijt(d.score_pt, cfg.score_pt);
  for (std::size_t t = 0; t < T; ++t) d.emission_cap(t) = draw(cfg.emission_cap);

  return propagate_interest(inst);
}

ProblemInstance propagate_interest(const ProblemInstance& inst) {
  if (inst.det.prices_propagated) {
    throw DataError("propagate_interest: prices already propagated for this instance");
  }
  ProblemInstance out = inst;
  const double g = 1.0 + out.det.interest_rate;
  const auto T = out.dims.periods;
  auto grow2 = [&](Arr2& a) {  // [i][t]
    for (std::size_t i = 0; i < a.extent(0); ++i)
      for (std::size_t t = 0; t + 1 < T; ++t) a(i, t + 1) = a(i, t) * g;
  };
  auto grow3 = [&](Arr3& a) {  // [i][j][t]
    for (std::size_t i = 0; i < a.extent(0); ++i)
      for (std::size_t j = 0; j < a.extent(1); ++j)
        for (std::size_t t = 0; t + 1 < T; ++t) a(i, j, t + 1) = a(i, j, t) * g;
  };
  for (auto& sc : out.scenarios) grow3(sc.purchase_cost);
  auto& d = out.det;
  grow2(d.holding_cost);
  grow2(d.backorder_cost);
  grow3(d.delay_penalty);
  grow3(d.reject_loss);
  grow2(d.disassembly_cost);
  grow2(d.remanufacture_cost);
  grow2(d.disposal_cost);
  for (std::size_t j = 0; j < d.transport_cost.extent(0); ++j)
    for (std::size_t t = 0; t + 1 < T; ++t)
      for (std::size_t k = 0; k < d.transport_cost.extent(2); ++k)
        for (std::size_t n = 0; n < kEchelons; ++n)
          d.transport_cost(j, t + 1, k, n) = d.transport_cost(j, t, k, n) * g;
  d.prices_propagated = true;
  return out;
}

TradePrices derive_trade_prices(const ProblemInstance& inst) {
  const auto T = inst.dims.periods;
  const auto& d = inst.det;
  if (d.seller_offers.extent(1) == 0 || d.buyer_offers.extent(1) == 0) {
    throw DataError("derive_trade_prices: empty offer list");
  }
  TradePrices tp;
  tp.sell_price.resize(T);
  tp.buy_price.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    double best_bid = -HUGE_VAL, best_ask = HUGE_VAL;
    for (std::size_t m = 0; m < d.buyer_offers.extent(1); ++m) best_bid = std::max(best_bid, d.buyer_offers(t, m));
    for (std::size_t m = 0; m < d.seller_offers.extent(1); ++m) best_ask = std::min(best_ask, d.seller_offers(t, m));
    tp.sell_price[t] = best_bid;
    tp.buy_price[t] = best_ask;
  }
  return tp;
}

// ---------------------------------------------------------------------------
// JSON I/O
// ---------------------------------------------------------------------------

namespace {

template <std::size_t Rank>
json nested(const NdArray<double, Rank>& a, std::size_t axis, std::size_t& pos) {
  json out = json::array();
  for (std::size_t n = 0; n < a.extent(axis); ++n) {
    if (axis + 1 == Rank) {
      out.push_back(a.flat()[pos++]);
    } else {
      out.push_back(nested(a, axis + 1, pos));
    }
  }
  return out;
}

template <std::size_t Rank>
json to_nested(const NdArray<double, Rank>& a) {
  std::size_t pos = 0;
  return nested(a, 0, pos);
}

template <std::size_t Rank>
void fill_nested(const json& j, NdArray<double, Rank>& a, std::size_t axis, std::size_t& pos,
                 const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected array");
  if (j.size() != a.extent(axis)) {
    throw SchemaError(where + ": dimension mismatch (expected " + std::to_string(a.extent(axis)) + ", got " +
                      std::to_string(j.size()) + ")");
  }
  for (const auto& e : j) {
    if (axis + 1 == Rank) {
      if (!e.is_number()) throw SchemaError(where + ": expected number");
      a.flat()[pos++] = e.get<double>();
    } else {
      fill_nested(e, a, axis + 1, pos, where);
    }
  }
}

template <std::size_t Rank>
void from_nested(const json& j, NdArray<double, Rank>& a, const std::string& where) {
  std::size_t pos = 0;
  fill_nested(j, a, 0, pos, where);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw SchemaError(where + ": unknown key \"" + key + "\"");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing required key \"" + key + "\"");
  return *it;
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number()) throw SchemaError(where + "." + key + ": expected number");
  return v.get<double>();
}

std::size_t count(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw SchemaError(where + "." + key + ": expected non-negative integer");
  return v.get<std::size_t>();
}

template <std::size_t Rank>
void read_field(const json& obj, const std::string& key, NdArray<double, Rank>& a, const std::string& where) {
  from_nested(require(obj, key, where), a, where + "." + key);
}

json range_json(const UniformRange& r) { return json::array({r.low, r.high}); }

UniformRange range_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw SchemaError(where + ": expected [low, high]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<UniformRange> ranges_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected array of ranges");
  std::vector<UniformRange> out;
  for (std::size_t n = 0; n < j.size(); ++n) out.push_back(range_from(j[n], where + "[" + std::to_string(n) + "]"));
  return out;
}

json dims_json(const Dimensions& d) {
  return json{{"products", d.products},         {"suppliers", d.suppliers}, {"periods", d.periods},
              {"truck_types", d.truck_types},   {"scenarios", d.scenarios}, {"market_offers", d.market_offers}};
}

Dimensions dims_from(const json& j, const std::string& where) {
  reject_unknown(j, {"products", "suppliers", "periods", "truck_types", "scenarios", "market_offers"}, where);
  Dimensions d;
  d.products = count(j, "products", where);
  d.suppliers = count(j, "suppliers", where);
  d.periods = count(j, "periods", where);
  d.truck_types = count(j, "truck_types", where);
  d.scenarios = count(j, "scenarios", where);
  d.market_offers = count(j, "market_offers", where);
  if (!d.products || !d.suppliers || !d.periods || !d.truck_types || !d.scenarios || !d.market_offers)
    throw SchemaError(where + ": all counts must be >= 1");
  return d;
}

}  // namespace

std::string instance_to_json(const ProblemInstance& inst) {
  json doc;
  doc["dims"] = dims_json(inst.dims);
  json scen = json::array();
  for (const auto& sc : inst.scenarios) {
    scen.push_back(json{{"probability", sc.probability},
                        {"purchase_cost", to_nested(sc.purchase_cost)},
                        {"delay_days", to_nested(sc.delay_days)},
                        {"reject_rate", to_nested(sc.reject_rate)},
                        {"collect_rate", to_nested(sc.collect_rate)},
                        {"usable_rejected", to_nested(sc.usable_rejected)},
                        {"reusable_collected", to_nested(sc.reusable_collected)},
                        {"demand", to_nested(sc.demand)}});
  }
  doc["scenarios"] = scen;
  const auto& d = inst.det;
  doc["det"] = json{{"interest_rate", d.interest_rate},
                    {"holding_cost", to_nested(d.holding_cost)},
                    {"backorder_cost", to_nested(d.backorder_cost)},
                    {"delay_penalty", to_nested(d.delay_penalty)},
                    {"reject_loss", to_nested(d.reject_loss)},
                    {"seller_offers", to_nested(d.seller_offers)},
                    {"buyer_offers", to_nested(d.buyer_offers)},
                    {"disassembly_cost", to_nested(d.disassembly_cost)},
                    {"remanufacture_cost", to_nested(d.remanufacture_cost)},
                    {"disposal_cost", to_nested(d.disposal_cost)},
                    {"transport_cost", to_nested(d.transport_cost)},
                    {"distance", to_nested(d.distance)},
                    {"transport_emission", to_nested(d.transport_emission)},
                    {"production_emission", to_nested(d.production_emission)},
                    {"remanufacture_emission", to_nested(d.remanufacture_emission)},
                    {"score_em", to_nested(d.score_em)},
                    {"score_gp", to_nested(d.score_gp)},
                    {"score_re", to_nested(d.score_re)},
                    {"score_pt", to_nested(d.score_pt)},
                    {"emission_cap", to_nested(d.emission_cap)},
                    {"truck_breakpoints", to_nested(d.truck_breakpoints)},
                    {"prices_propagated", d.prices_propagated}};
  const auto& r = inst.robust;
  doc["robust"] = json{{"lambda1", r.lambda1},
                       {"lambda2", r.lambda2},
                       {"omega", r.omega},
                       {"market_depth_bound", r.market_depth_bound}};
  json reg;
  reg["kind"] = inst.regime.kind == RegimeKind::cap_and_trade ? "cap_and_trade" : "penalty";
  reg["penalty_rate"] = inst.regime.penalty_rate ? json(*inst.regime.penalty_rate) : json(nullptr);
  doc["regime"] = reg;
  return doc.dump(1) + "\n";
}

ProblemInstance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed document: ") + e.what());
  }
  reject_unknown(doc, {"dims", "scenarios", "det", "robust", "regime"}, "instance");
  const Dimensions dims = dims_from(require(doc, "dims", "instance"), "dims");
  ProblemInstance inst = make_empty_instance(dims);

  const auto& scen = require(doc, "scenarios", "instance");
  if (!scen.is_array()) throw SchemaError("scenarios: expected array");
  if (scen.size() != dims.scenarios) {
    throw SchemaError("scenarios: dimension mismatch (expected " + std::to_string(dims.scenarios) + ", got " +
                      std::to_string(scen.size()) + ")");
  }
  for (std::size_t s = 0; s < dims.scenarios; ++s) {
    const std::string w = "scenarios[" + std::to_string(s) + "]";
    const auto& js = scen[s];
    reject_unknown(js,
                   {"probability", "purchase_cost", "delay_days", "reject_rate", "collect_rate", "usable_rejected",
                    "reusable_collected", "demand"},
                   w);
    auto& sc = inst.scenarios[s];
    sc.probability = number(js, "probability", w);
    read_field(js, "purchase_cost", sc.purchase_cost, w);
    read_field(js, "delay_days", sc.delay_days, w);
    read_field(js, "reject_rate", sc.reject_rate, w);
    read_field(js, "collect_rate", sc.collect_rate, w);
    read_field(js, "usable_rejected", sc.usable_rejected, w);
    read_field(js, "reusable_collected", sc.reusable_collected, w);
    read_field(js, "demand", sc.demand, w);
  }

  const auto& jd = require(doc, "det", "instance");
  reject_unknown(jd,
                 {"interest_rate", "holding_cost", "backorder_cost", "delay_penalty", "reject_loss", "seller_offers",
                  "buyer_offers", "disassembly_cost", "remanufacture_cost", "disposal_cost", "transport_cost",
                  "distance", "transport_emission", "production_emission", "remanufacture_emission", "score_em",
                  "score_gp", "score_re", "score_pt", "emission_cap", "truck_breakpoints", "prices_propagated"},
                 "det");
  auto& d = inst.det;
  d.interest_rate = number(jd, "interest_rate", "det");
  read_field(jd, "holding_cost", d.holding_cost, "det");
  read_field(jd, "backorder_cost", d.backorder_cost, "det");
  read_field(jd, "delay_penalty", d.delay_penalty, "det");
  read_field(jd, "reject_loss", d.reject_loss, "det");
  read_field(jd, "seller_offers", d.seller_offers, "det");
  read_field(jd, "buyer_offers", d.buyer_offers, "det");
  read_field(jd, "disassembly_cost", d.disassembly_cost, "det");
  read_field(jd, "remanufacture_cost", d.remanufacture_cost, "det");
  read_field(jd, "disposal_cost", d.disposal_cost, "det");
  read_field(jd, "transport_cost", d.transport_cost, "det");
  read_field(jd, "distance", d.distance, "det");
  read_field(jd, "transport_emission", d.transport_emission, "det");
  read_field(jd, "production_emission", d.production_emission, "det");
  read_field(jd, "remanufacture_emission", d.remanufacture_emission, "det");
  read_field(jd, "score_em", d.score_em, "det");
  read_field(jd, "score_gp", d.score_gp, "det");
  read_field(jd, "score_re", d.score_re, "det");
  read_field(jd, "score_pt", d.score_pt, "det");
  read_field(jd, "emission_cap", d.emission_cap, "det");
  read_field(jd, "truck_breakpoints", d.truck_breakpoints, "det");
  if (auto it = jd.find("prices_propagated"); it != jd.end()) {
    if (!it->is_boolean()) throw SchemaError("det.prices_propagated: expected boolean");
    d.prices_propagated = it->get<bool>();
  }

  const auto& jr = require(doc, "robust", "instance");
  reject_unknown(jr, {"lambda1", "lambda2", "omega", "market_depth_bound"}, "robust");
  inst.robust.lambda1 = number(jr, "lambda1", "robust");
  inst.robust.lambda2 = number(jr, "lambda2", "robust");
  inst.robust.omega = number(jr, "omega", "robust");
  inst.robust.market_depth_bound = number(jr, "market_depth_bound", "robust");

  const auto& jg = require(doc, "regime", "instance");
  reject_unknown(jg, {"kind", "penalty_rate"}, "regime");
  const auto& kind = require(jg, "kind", "regime");
  if (kind == "cap_and_trade") {
    inst.regime.kind = RegimeKind::cap_and_trade;
  } else if (kind == "penalty") {
    inst.regime.kind = RegimeKind::penalty;
  } else {
    throw SchemaError("regime.kind: expected \"cap_and_trade\" or \"penalty\"");
  }
  if (auto it = jg.find("penalty_rate"); it != jg.end() && !it->is_null()) {
    if (!it->is_number()) throw SchemaError("regime.penalty_rate: expected number or null");
    inst.regime.penalty_rate = it->get<double>();
  }
  return inst;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot write " + path.string());
  out << text;
  if (!out) throw FileError("write failed for " + path.string());
}

void save_instance(const ProblemInstance& inst, const std::filesystem::path& path) {
  write_text_file(path, instance_to_json(inst));
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Generator config files
// ---------------------------------------------------------------------------

std::string config_to_json(const GeneratorConfig& c) {
  auto list = [](const std::vector<UniformRange>& v) {
    json a = json::array();
    for (const auto& r : v) a.push_back(range_json(r));
    return a;
  };
  json tc = json::array();
  for (const auto& per_k : c.transport_cost) tc.push_back(list(per_k));
  json doc{{"seed", c.seed},
           {"dims", dims_json(c.dims)},
           {"interest_rate", c.interest_rate},
           {"lambda1", c.lambda1},
           {"lambda2", c.lambda2},
           {"omega", c.omega},
           {"market_depth_bound", c.market_depth_bound},
           {"probabilities", c.probabilities},
           {"truck_breakpoints", c.truck_breakpoints},
           {"purchase_cost", list(c.purchase_cost)},
           {"holding_cost", range_json(c.holding_cost)},
           {"backorder_cost", range_json(c.backorder_cost)},
           {"delay_days", list(c.delay_days)},
           {"delay_penalty", range_json(c.delay_penalty)},
           {"reject_rate", list(c.reject_rate)},
           {"collect_rate", list(c.collect_rate)},
           {"usable_rejected", list(c.usable_rejected)},
           {"reusable_collected", list(c.reusable_collected)},
           {"reject_loss", range_json(c.reject_loss)},
           {"seller_offers", range_json(c.seller_offers)},
           {"buyer_offers", range_json(c.buyer_offers)},
           {"disassembly_cost", range_json(c.disassembly_cost)},
           {"remanufacture_cost", range_json(c.remanufacture_cost)},
           {"disposal_cost", range_json(c.disposal_cost)},
           {"transport_cost", tc},
           {"demand", list(c.demand)},
           {"distance", range_json(c.distance)},
           {"transport_emission", list(c.transport_emission)},
           {"production_emission", range_json(c.production_emission)},
           {"remanufacture_emission", range_json(c.remanufacture_emission)},
           {"score_em", range_json(c.score_em)},
           {"score_gp", range_json(c.score_gp)},
           {"score_re", range_json(c.score_re)},
           {"score_pt", range_json(c.score_pt)},
           {"emission_cap", range_json(c.emission_cap)}};
  return doc.dump(1) + "\n";
}

// Keys are optional; missing keys keep the default recipe (resized to the
// given dims), so a config file may override just a few rows.
GeneratorConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed config: ") + e.what());
  }
  const std::set<std::string> ranges1{"holding_cost",     "backorder_cost",      "delay_penalty",
                                      "reject_loss",      "seller_offers",       "buyer_offers",
                                      "disassembly_cost", "remanufacture_cost",  "disposal_cost",
                                      "distance",         "production_emission", "remanufacture_emission",
                                      "score_em",         "score_gp",            "score_re",
                                      "score_pt",         "emission_cap"};
  const std::set<std::string> range_lists{"purchase_cost",      "delay_days", "reject_rate", "collect_rate",
                                          "usable_rejected",    "reusable_collected", "demand",
                                          "transport_emission"};
  std::set<std::string> allowed{"seed",  "dims",  "interest_rate",     "lambda1",       "lambda2",
                                "omega", "market_depth_bound", "probabilities", "truck_breakpoints",
                                "transport_cost"};
  allowed.insert(ranges1.begin(), ranges1.end());
  allowed.insert(range_lists.begin(), range_lists.end());
  reject_unknown(doc, allowed, "config");

  GeneratorConfig c;
  if (doc.contains("dims")) c = GeneratorConfig::for_dims(dims_from(doc["dims"], "dims"));
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) throw SchemaError("seed: expected integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  for (auto [key, field] : {std::pair{"interest_rate", &c.interest_rate}, std::pair{"lambda1", &c.lambda1},
                            std::pair{"lambda2", &c.lambda2}, std::pair{"omega", &c.omega},
                            std::pair{"market_depth_bound", &c.market_depth_bound}}) {
    if (doc.contains(key)) *field = number(doc, key, "config");
  }
  auto numbers = [&](const char* key, std::vector<double>& out) {
    if (!doc.contains(key)) return;
    const auto& a = doc[key];
    if (!a.is_array()) throw SchemaError(std::string(key) + ": expected array");
    out.clear();
    for (const auto& e : a) {
      if (!e.is_number()) throw SchemaError(std::string(key) + ": expected numbers");
      out.push_back(e.get<double>());
    }
  };
  numbers("probabilities", c.probabilities);
  numbers("truck_breakpoints", c.truck_breakpoints);

  std::map<std::string, UniformRange*> r1{{"holding_cost", &c.holding_cost},
                                          {"backorder_cost", &c.backorder_cost},
                                          {"delay_penalty", &c.delay_penalty},
                                          {"reject_loss", &c.reject_loss},
                                          {"seller_offers", &c.seller_offers},
                                          {"buyer_offers", &c.buyer_offers},
                                          {"disassembly_cost", &c.disassembly_cost},
                                          {"remanufacture_cost", &c.remanufacture_cost},
                                          {"disposal_cost", &c.disposal_cost},
                                          {"distance", &c.distance},
                                          {"production_emission", &c.production_emission},
                                          {"remanufacture_emission", &c.remanufacture_emission},
                                          {"score_em", &c.score_em},
                                          {"score_gp", &c.score_gp},
                                          {"score_re", &c.score_re},
                                          {"score_pt", &c.score_pt},
                                          {"emission_cap", &c.emission_cap}};
  for (auto& [key, field] : r1)
    if (doc.contains(key)) *field = range_from(doc[key], key);
  std::map<std::string, std::vector<UniformRange>*> rl{{"purchase_cost", &c.purchase_cost},
                                                       {"delay_days", &c.delay_days},
                                                       {"reject_rate", &c.reject_rate},
                                                       {"collect_rate", &c.collect_rate},
                                                       {"usable_rejected", &c.usable_rejected},
                                                       {"reusable_collected", &c.reusable_collected},
                                                       {"demand", &c.demand},
                                                       {"transport_emission", &c.transport_emission}};
  for (auto& [key, field] : rl)
    if (doc.contains(key)) *field = ranges_from(doc[key], key);
  if (doc.contains("transport_cost")) {
    const auto& a = doc["transport_cost"];
    if (!a.is_array()) throw SchemaError("transport_cost: expected array");
    c.transport_cost.clear();
    for (std::size_t k = 0; k < a.size(); ++k)
      c.transport_cost.push_back(ranges_from(a[k], "transport_cost[" + std::to_string(k) + "]"));
  }
  return c;
}

GeneratorConfig load_config(const std::filesystem::path& path) { return config_from_json(read_text_file(path)); }

}  // namespace gss
