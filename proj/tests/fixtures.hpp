#pragma once

#include "gss/domain.hpp"
#include "gss/instance.hpp"

// Small seeded instance using the default sampling recipe.
inline gss::ProblemInstance small_instance(std::uint64_t seed, std::size_t I, std::size_t J, std::size_t T,
                                           std::size_t K, std::size_t S) {
  gss::Dimensions d;
  d.products = I;
  d.suppliers = J;
  d.periods = T;
  d.truck_types = K;
  d.scenarios = S;
  return gss::generate_instance(gss::GeneratorConfig::for_dims(d, seed));
}

// All-zero data with uniform probabilities and breakpoints 1000, 2000, ...
inline gss::ProblemInstance null_instance(const gss::Dimensions& d) {
  auto inst = gss::make_empty_instance(d);
  for (auto& sc : inst.scenarios) sc.probability = 1.0 / static_cast<double>(d.scenarios);
  for (std::size_t k = 0; k < d.truck_types; ++k) inst.det.truck_breakpoints(k) = 1000.0 * static_cast<double>(k + 1);
  return inst;
}

inline gss::Dimensions dims_of(std::size_t I, std::size_t J, std::size_t T, std::size_t K, std::size_t S,
                               std::size_t M = 1) {
  gss::Dimensions d;
  d.products = I;
  d.suppliers = J;
  d.periods = T;
  d.truck_types = K;
  d.scenarios = S;
  d.market_offers = M;
  return d;
}
