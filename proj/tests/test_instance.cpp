#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <json.hpp>

#include "fixtures.hpp"
#include "gss/instance.hpp"

using namespace gss;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gss_test_" + name);
}

// First-period-only data for the price-growth tests.
ProblemInstance unpropagated(double ir) {
  auto inst = null_instance(dims_of(1, 1, 4, 1, 1));
  inst.det.interest_rate = ir;
  inst.scenarios[0].purchase_cost(0, 0, 0) = 10.0;
  inst.det.holding_cost(0, 0) = 30.0;
  inst.det.backorder_cost(0, 0) = 35.0;
  inst.det.delay_penalty(0, 0, 0) = 7.0;
  inst.det.reject_loss(0, 0, 0) = 8.0;
  inst.det.disassembly_cost(0, 0) = 5.0;
  inst.det.remanufacture_cost(0, 0) = 12.0;
  inst.det.disposal_cost(0, 0) = 4.0;
  inst.det.transport_cost(0, 0, 0, 0) = 30.0;
  inst.det.transport_cost(0, 0, 0, 1) = 31.0;
  inst.det.production_emission(0, 0, 0) = 0.01;
  inst.det.emission_cap(0) = 180.0;
  inst.scenarios[0].demand(0, 0) = 3000.0;
  inst.det.score_em(0, 0, 0) = 4.0;
  return inst;
}

}  // namespace

TEST_CASE("instance: default generator settings") {
  const auto inst = generate_instance(GeneratorConfig{.seed = 3});
  CHECK(inst.det.interest_rate == 0.04);
  CHECK(inst.robust.lambda1 == 15.0);
  CHECK(inst.robust.lambda2 == 15.0);
  CHECK(inst.robust.omega == 50.0);
  REQUIRE(inst.scenarios.size() == 3);
  CHECK(inst.scenarios[0].probability == 0.2);
  CHECK(inst.scenarios[1].probability == 0.6);
  CHECK(inst.scenarios[2].probability == 0.2);
  CHECK(inst.det.truck_breakpoints.flat() == std::vector<double>{3000, 6000, 14000});
  CHECK(inst.det.prices_propagated);
}

TEST_CASE("instance: scenario-specific ranges are respected") {
  const double lo[3] = {2500, 2930, 3070}, hi[3] = {4600, 4760, 4990};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = generate_instance(GeneratorConfig{.seed = seed});
    for (std::size_t s = 0; s < 3; ++s)
      for (double v : inst.scenarios[s].demand) {
        CHECK(v >= lo[s]);
        CHECK(v <= hi[s]);
      }
    for (double v : inst.det.seller_offers) CHECK((v >= 4000 && v <= 4020));
    for (double v : inst.det.buyer_offers) CHECK((v >= 3980 && v <= 4000));
    for (double v : inst.det.emission_cap) CHECK((v >= 170 && v <= 200));
    // First-period purchase costs are drawn; later ones are grown.
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        CHECK(inst.scenarios[1].purchase_cost(i, j, 0) >= 11.5);
        CHECK(inst.scenarios[1].purchase_cost(i, j, 0) <= 26);
      }
  }
}

TEST_CASE("instance: same seed gives identical bytes") {
  const auto a = instance_to_json(generate_instance(GeneratorConfig{.seed = 7}));
  const auto b = instance_to_json(generate_instance(GeneratorConfig{.seed = 7}));
  CHECK(a == b);
}

TEST_CASE("instance: different seeds differ in some sampled field") {
  const auto a = nlohmann::json::parse(instance_to_json(generate_instance(GeneratorConfig{.seed = 1})));
  const auto b = nlohmann::json::parse(instance_to_json(generate_instance(GeneratorConfig{.seed = 2})));
  std::size_t differing = 0;
  for (const auto& key : {"scenarios", "det"}) {
    const auto diff = nlohmann::json::diff(a[key], b[key]);
    differing += diff.size();
  }
  CHECK(differing > 0);
  CHECK(a["dims"] == b["dims"]);
  CHECK(a["robust"] == b["robust"]);
}

TEST_CASE("instance: interest growth on one step") {
  const auto out = propagate_interest(unpropagated(0.04));
  CHECK(out.det.holding_cost(0, 1) == doctest::Approx(31.2).epsilon(1e-12));
}

TEST_CASE("instance: interest growth compounds over three steps") {
  const auto out = propagate_interest(unpropagated(0.04));
  double expect = 10.0;
  for (int step = 0; step < 3; ++step) expect *= 1.04;
  CHECK(std::abs(out.scenarios[0].purchase_cost(0, 0, 3) - 11.2486) < 1e-4);
  CHECK(std::abs(out.scenarios[0].purchase_cost(0, 0, 3) - expect) < 1e-9);
}

TEST_CASE("instance: zero interest keeps every period equal") {
  const auto out = propagate_interest(unpropagated(0.0));
  for (std::size_t t = 1; t < 4; ++t) {
    CHECK(out.scenarios[0].purchase_cost(0, 0, t) == 10.0);
    CHECK(out.det.holding_cost(0, t) == 30.0);
    CHECK(out.det.transport_cost(0, t, 0, 1) == 31.0);
  }
}

TEST_CASE("instance: interest applies to the nine priced families only") {
  const auto in = unpropagated(0.1);
  const auto out = propagate_interest(in);
  const double g = 1.1;
  CHECK(out.det.backorder_cost(0, 1) == doctest::Approx(35 * g));
  CHECK(out.det.delay_penalty(0, 0, 1) == doctest::Approx(7 * g));
  CHECK(out.det.reject_loss(0, 0, 1) == doctest::Approx(8 * g));
  CHECK(out.det.disassembly_cost(0, 1) == doctest::Approx(5 * g));
  CHECK(out.det.remanufacture_cost(0, 1) == doctest::Approx(12 * g));
  CHECK(out.det.disposal_cost(0, 1) == doctest::Approx(4 * g));
  CHECK(out.det.transport_cost(0, 1, 0, 0) == doctest::Approx(30 * g));
  // Emissions, caps, demand and scores keep their first-period values.
  CHECK(out.det.production_emission(0, 0, 1) == 0.0);
  CHECK(out.det.emission_cap(1) == 0.0);
  CHECK(out.scenarios[0].demand(0, 1) == 0.0);
  CHECK(out.det.score_em(0, 0, 1) == 0.0);
}

TEST_CASE("instance: growth cannot be applied twice") {
  const auto once = propagate_interest(unpropagated(0.04));
  CHECK_THROWS_AS(propagate_interest(once), DataError);
  CHECK_THROWS_AS(propagate_interest(generate_instance(GeneratorConfig{})), DataError);
}

TEST_CASE("instance: trade prices") {
  auto inst = null_instance(dims_of(1, 1, 2, 1, 1, 3));
  inst.det.buyer_offers(0, 0) = 3980;
  inst.det.buyer_offers(0, 1) = 3990;
  inst.det.buyer_offers(0, 2) = 4000;
  inst.det.seller_offers(0, 0) = 4000;
  inst.det.seller_offers(0, 1) = 4010;
  inst.det.seller_offers(0, 2) = 4020;
  const auto tp = derive_trade_prices(inst);
  CHECK(tp.sell_price[0] == 4000);
  CHECK(tp.buy_price[0] == 4000);

  auto one = null_instance(dims_of(1, 1, 1, 1, 1, 1));
  one.det.buyer_offers(0, 0) = 3987.5;
  one.det.seller_offers(0, 0) = 4011.25;
  const auto tp1 = derive_trade_prices(one);
  CHECK(tp1.sell_price[0] == 3987.5);
  CHECK(tp1.buy_price[0] == 4011.25);
}

TEST_CASE("instance: default offers leave no arbitrage") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = generate_instance(GeneratorConfig{.seed = seed});
    const auto tp = derive_trade_prices(inst);
    for (std::size_t t = 0; t < inst.dims.periods; ++t) {
      double bp_max = 0, sp_min = 1e300;
      for (std::size_t m = 0; m < inst.dims.market_offers; ++m) {
        bp_max = std::max(bp_max, inst.det.buyer_offers(t, m));
        sp_min = std::min(sp_min, inst.det.seller_offers(t, m));
      }
      CHECK(tp.sell_price[t] == bp_max);
      CHECK(tp.buy_price[t] == sp_min);
      CHECK(tp.buy_price[t] >= tp.sell_price[t]);
    }
  }
}

TEST_CASE("instance: empty offer list is a data error") {
  auto inst = null_instance(dims_of(1, 1, 1, 1, 1, 1));
  inst.det.buyer_offers = Arr2({1, 0});
  CHECK_THROWS_AS(derive_trade_prices(inst), DataError);
}

TEST_CASE("instance: file round trip is exact") {
  auto inst = generate_instance(GeneratorConfig{.seed = 11});
  inst.regime.kind = RegimeKind::penalty;
  inst.regime.penalty_rate = 1234.5678901234567;
  inst.det.holding_cost(0, 0) = 0.1 + 0.2;
  const auto path = temp_path("roundtrip.json");
  save_instance(inst, path);
  const auto back = load_instance(path);
  CHECK(back == inst);
  std::filesystem::remove(path);
}

TEST_CASE("instance: schema errors") {
  auto doc = nlohmann::json::parse(instance_to_json(generate_instance(GeneratorConfig{.seed = 1})));

  auto missing = doc;
  missing.erase("scenarios");
  CHECK_THROWS_AS(instance_from_json(missing.dump()), SchemaError);

  auto short_list = doc;
  short_list["scenarios"].erase(2);
  CHECK_THROWS_WITH_AS(instance_from_json(short_list.dump()), doctest::Contains("dimension mismatch"), SchemaError);

  auto unknown = doc;
  unknown["robust"]["gamma"] = 1.0;
  CHECK_THROWS_WITH_AS(instance_from_json(unknown.dump()), doctest::Contains("unknown key"), SchemaError);

  auto bad_shape = doc;
  bad_shape["det"]["distance"].erase(0);
  CHECK_THROWS_AS(instance_from_json(bad_shape.dump()), SchemaError);

  CHECK_THROWS_AS(instance_from_json("{not json"), SchemaError);
}

TEST_CASE("instance: config validation names the bound") {
  GeneratorConfig cfg;
  cfg.holding_cost = {40, 30};
  CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("holding_cost"), ConfigError);

  GeneratorConfig cfg2;
  cfg2.demand[1] = {5000, 4000};
  CHECK_THROWS_WITH_AS(validate_config(cfg2), doctest::Contains("demand[1]"), ConfigError);

  GeneratorConfig cfg3;
  cfg3.truck_breakpoints = {6000, 3000, 14000};
  CHECK_THROWS_AS(validate_config(cfg3), ConfigError);

  GeneratorConfig cfg4;
  cfg4.probabilities = {0.5, 0.6, 0.2};
  CHECK_THROWS_AS(validate_config(cfg4), ConfigError);

  CHECK_NOTHROW(validate_config(GeneratorConfig{}));
}

TEST_CASE("instance: config round trip") {
  GeneratorConfig cfg = GeneratorConfig::for_dims(dims_of(2, 3, 2, 2, 2, 2), 99);
  cfg.omega = 12.5;
  const auto back = config_from_json(config_to_json(cfg));
  CHECK(back == cfg);
  CHECK_THROWS_AS(config_from_json(R"({"seed": 1, "bogus": 2})"), SchemaError);
}

TEST_CASE("instance: resized recipes generate valid instances") {
  const auto cfg = GeneratorConfig::for_dims(dims_of(2, 3, 5, 4, 2, 2), 5);
  CHECK_NOTHROW(validate_config(cfg));
  const auto inst = generate_instance(cfg);
  CHECK(validate_instance(inst).ok());
  CHECK(inst.scenarios.size() == 2);
  CHECK(inst.det.truck_breakpoints.size() == 4);
}
