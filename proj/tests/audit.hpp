#pragma once

// Recomputes inventory balance and emission cap residuals from a report's
// arrays alone, without the model.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "gss/procedure.hpp"

struct Audit {
  double balance = 0.0;  // worst |lhs - rhs| over (i, t, s)
  double cap = 0.0;      // worst excess over (t, s)
  std::string worst;
};

inline Audit audit_report(const gss::ProblemInstance& inst, const gss::SolveReport& rep) {
  Audit a;
  const auto& d = inst.dims;
  const std::size_t P = rep.q.extent(2);
  for (std::size_t s = 0; s < d.scenarios; ++s) {
    const auto& sc = inst.scenarios[s];
    for (std::size_t i = 0; i < d.products; ++i)
      for (std::size_t t = 0; t < d.periods; ++t) {
        long double supply = 0, dm = 0, dp = 0;
        for (std::size_t j = 0; j < d.suppliers; ++j) {
          supply += rep.x(i, j, t);
          dm += rep.delta_minus(i, j, t, s);
          dp += rep.delta_plus(i, j, t, s);
        }
        const long double recovered = (sc.usable_rejected(i, t) * sc.reject_rate(i, t) +
                                       sc.reusable_collected(i, t) * sc.collect_rate(i, t)) *
                                      supply;
        const long double prev_r = t ? rep.r(i, t - 1) : 0.0, prev_b = t ? rep.b(i, t - 1) : 0.0;
        const long double lhs = recovered + supply + rep.b(i, t) + prev_r + dm;
        const long double rhs = sc.demand(i, t) + rep.r(i, t) + prev_b + dp;
        const double res = static_cast<double>(std::fabs(lhs - rhs));
        if (res > a.balance) {
          a.balance = res;
          std::ostringstream os;
          os << "balance i=" << i << " t=" << t << " s=" << s;
          a.worst = os.str();
        }
      }
    for (std::size_t t = 0; t < d.periods; ++t) {
      long double em = 0;
      for (std::size_t j = 0; j < d.suppliers; ++j)
        for (std::size_t k = 0; k < P; ++k)
          em += inst.det.distance(j) *
                inst.det.transport_emission(j, t, std::min(k, d.truck_types - 1), gss::kBuyerEchelon) *
                rep.q(j, t, k, gss::kBuyerEchelon);
      for (std::size_t i = 0; i < d.products; ++i) {
        const long double reman = (sc.reject_rate(i, t) * sc.usable_rejected(i, t) +
                                   sc.collect_rate(i, t) * sc.reusable_collected(i, t)) *
                                  inst.det.remanufacture_emission(i, t);
        for (std::size_t j = 0; j < d.suppliers; ++j)
          em += (inst.det.production_emission(i, j, t) + reman) * rep.x(i, j, t);
      }
      const double excess =
          static_cast<double>(em - (inst.det.emission_cap(t) + rep.buy(t) - rep.sell(t)));
      if (excess > a.cap) {
        a.cap = excess;
        std::ostringstream os;
        os << "cap t=" << t << " s=" << s;
        if (a.cap > a.balance) a.worst = os.str();
      }
    }
  }
  return a;
}
