#include "gss/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gss {

namespace {

// Runs job(k) for k in [0, n) on `workers` threads. Results land by index, so
// output order never depends on completion order.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) job(k);
    });
  }
  for (auto& th : pool) th.join();
}

std::size_t resolve_workers(std::size_t w) { return w == 0 ? default_workers() : w; }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

bool close(double a, double b, double slack) { return std::abs(a - b) <= slack * std::max(1.0, std::abs(a)); }

}  // namespace

const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::omega: return "omega";
    case SweepParam::lambda1: return "lambda1";
    case SweepParam::lambda2: return "lambda2";
    case SweepParam::cap_scale: return "cap_scale";
    case SweepParam::bp_scale: return "bp_scale";
    case SweepParam::sp_scale: return "sp_scale";
  }
  return "unknown";
}

SweepParam parse_sweep_param(const std::string& name) {
  for (auto p : {SweepParam::omega, SweepParam::lambda1, SweepParam::lambda2, SweepParam::cap_scale,
                 SweepParam::bp_scale, SweepParam::sp_scale})
    if (name == to_string(p)) return p;
  throw std::invalid_argument("unknown sweep parameter '" + name +
                              "' (expected omega, lambda1, lambda2, cap_scale, bp_scale or sp_scale)");
}

std::size_t default_workers() {
  if (const char* env = std::getenv("GSS_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return 1;
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep value list is empty");
  const bool scale = parameter == SweepParam::cap_scale || parameter == SweepParam::bp_scale ||
                     parameter == SweepParam::sp_scale;
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("sweep values must be finite");
    if (scale && v <= -1.0) throw std::invalid_argument(std::string(to_string(parameter)) + " values must exceed -1");
    if (!scale && v < 0.0) throw std::invalid_argument(std::string(to_string(parameter)) + " values must be >= 0");
  }
}

ProblemInstance apply_parameter(const ProblemInstance& base, SweepParam p, double value) {
  ProblemInstance inst = base;
  switch (p) {
    case SweepParam::omega: inst.robust.omega = value; break;
    case SweepParam::lambda1: inst.robust.lambda1 = value; break;
    case SweepParam::lambda2: inst.robust.lambda2 = value; break;
    case SweepParam::cap_scale:
      for (double& c : inst.det.emission_cap) c *= 1.0 + value;
      break;
    case SweepParam::bp_scale:
      for (double& c : inst.det.buyer_offers) c *= 1.0 + value;
      break;
    case SweepParam::sp_scale:
      for (double& c : inst.det.seller_offers) c *= 1.0 + value;
      break;
  }
  return inst;
}

bool arbitrage_flag(const ProblemInstance& inst, const SolveReport& rep) {
  const TradePrices tp = derive_trade_prices(inst);
  const double depth = inst.robust.market_depth_bound;
  const double tol = 1e-6 * std::max(1.0, depth);
  bool any = false;
  for (std::size_t t = 0; t < inst.dims.periods; ++t) {
    if (tp.sell_price[t] <= tp.buy_price[t]) continue;
    any = true;
    if (rep.buy(t) < depth - tol || rep.sell(t) < depth - tol) return false;
  }
  return any;
}

SweepRow row_from_report(double value, const ProblemInstance& inst, const SolveReport& rep) {
  SweepRow row;
  row.value = value;
  row.ok = true;
  row.status = rep.status;
  row.z_total = rep.z_total;
  row.z1 = rep.z1;
  row.z2 = rep.z2;
  row.z3 = rep.z3;
  row.infeasibility = rep.total_infeasibility(inst);
  row.buy_total = rep.total_buy();
  row.sell_total = rep.total_sell();
  row.deviation1 = rep.deviation1(inst);
  row.deviation2 = rep.deviation2(inst);
  row.buy.assign(rep.buy.begin(), rep.buy.end());
  row.sell.assign(rep.sell.begin(), rep.sell.end());
  const TradePrices tp = derive_trade_prices(inst);
  for (std::size_t t = 0; t < inst.dims.periods; ++t) row.price_crossed |= tp.sell_price[t] > tp.buy_price[t];
  row.arbitrage = arbitrage_flag(inst, rep);
  for (const auto& st : rep.stages) {
    row.stage_seconds.push_back(st.seconds);
    row.stage_status.push_back(to_string(st.status));
  }
  return row;
}

SweepReport sweep(const SweepSpec& spec, StageCache* cache) {
  spec.validate();
  require_valid(spec.base);
  SweepReport rep;
  rep.parameter = spec.parameter;
  rep.rows.resize(spec.values.size());
  StageCache local;
  StageCache* c = cache ? cache : &local;
  parallel_for(spec.values.size(), resolve_workers(spec.workers), [&](std::size_t k) {
    const double v = spec.values[k];
    const ProblemInstance inst = apply_parameter(spec.base, spec.parameter, v);
    try {
      rep.rows[k] = row_from_report(v, inst, full_solve(inst, spec.options, c));
    } catch (const ProcedureError& e) {
      SweepRow row;
      row.value = v;
      row.error = e.what();
      row.status = e.status();
      rep.rows[k] = row;
    } catch (const std::exception& e) {
      SweepRow row;
      row.value = v;
      row.error = e.what();
      rep.rows[k] = row;
    }
  });
  return rep;
}

SweepReport sweep_cap(const SweepSpec& spec, StageCache* cache) {
  if (spec.parameter != SweepParam::cap_scale) throw std::invalid_argument("sweep_cap needs parameter cap_scale");
  return sweep(spec, cache);
}

SweepReport sweep_prices(const SweepSpec& spec, StageCache* cache) {
  if (spec.parameter != SweepParam::bp_scale && spec.parameter != SweepParam::sp_scale)
    throw std::invalid_argument("sweep_prices needs parameter bp_scale or sp_scale");
  return sweep(spec, cache);
}

namespace {

// Rows sorted along the direction in which the trend is stated: increasing
// weight for omega and the lambdas, increasing cap reduction for cap_scale.
std::vector<const SweepRow*> ordered(const SweepReport& rep) {
  std::vector<const SweepRow*> rows;
  for (const auto& r : rep.rows) rows.push_back(&r);
  const bool descending = rep.parameter == SweepParam::cap_scale;
  std::stable_sort(rows.begin(), rows.end(), [descending](const SweepRow* a, const SweepRow* b) {
    return descending ? a->value > b->value : a->value < b->value;
  });
  return rows;
}

TrendCheck monotone(const std::vector<const SweepRow*>& rows, const std::string& name, double SweepRow::*col,
                    bool increasing, double slack) {
  TrendCheck tc;
  tc.name = name;
  tc.pass = true;
  for (const auto* r : rows) {
    if (!r->ok) {
      tc.pass = false;
      tc.detail = "row " + num(r->value) + " failed: " + r->error;
      return tc;
    }
  }
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double a = rows[k - 1]->*col, b = rows[k]->*col;
    const double tol = slack * std::max(1.0, std::abs(a));
    const bool bad = increasing ? b < a - tol : b > a + tol;
    if (bad) {
      tc.pass = false;
      tc.detail = "at " + num(rows[k - 1]->value) + " -> " + num(rows[k]->value) + ": " + num(a) + " -> " + num(b);
      return tc;
    }
  }
  return tc;
}

}  // namespace

std::vector<TrendCheck> check_trends(const SweepReport& rep, double slack) {
  const auto rows = ordered(rep);
  std::vector<TrendCheck> out;
  switch (rep.parameter) {
    case SweepParam::omega:
      out.push_back(monotone(rows, "infeasibility non-increasing", &SweepRow::infeasibility, false, slack));
      out.push_back(monotone(rows, "z_total non-decreasing", &SweepRow::z_total, true, slack));
      break;
    case SweepParam::lambda1:
      out.push_back(monotone(rows, "deviation1 non-increasing", &SweepRow::deviation1, false, slack));
      out.push_back(monotone(rows, "z1 non-decreasing", &SweepRow::z1, true, slack));
      break;
    case SweepParam::lambda2:
      out.push_back(monotone(rows, "z2 non-decreasing", &SweepRow::z2, true, slack));
      break;
    case SweepParam::cap_scale:
      out.push_back(monotone(rows, "z1 non-decreasing as the cap falls", &SweepRow::z1, true, slack));
      out.push_back(monotone(rows, "allowance bought non-decreasing as the cap falls", &SweepRow::buy_total, true, slack));
      out.push_back(monotone(rows, "allowance sold non-increasing as the cap falls", &SweepRow::sell_total, false, slack));
      break;
    case SweepParam::bp_scale: {
      TrendCheck tc{"arbitrage flagged wherever buyer offers exceed seller offers", true, ""};
      for (const auto& r : rep.rows) {
        if (!r.ok) {
          tc.pass = false;
          tc.detail = "row " + num(r.value) + " failed: " + r.error;
          break;
        }
        if (r.price_crossed && !r.arbitrage) {
          tc.pass = false;
          tc.detail = "row " + num(r.value) + ": offers cross but trades stop short of the depth bound (bought " +
                      num(r.buy_total) + ", sold " + num(r.sell_total) + ")";
          break;
        }
      }
      out.push_back(tc);
      break;
    }
    case SweepParam::sp_scale: {
      TrendCheck tc{"raising seller offers leaves the solution unchanged", true, ""};
      const SweepRow* base = nullptr;
      for (const auto& r : rep.rows)
        if (r.value == 0.0) base = &r;
      if (!base) {
        tc.detail = "no baseline row (value 0); nothing compared";
      } else {
        for (const auto& r : rep.rows) {
          if (r.value < 0.0) continue;
          if (!r.ok || !base->ok) {
            tc.pass = false;
            tc.detail = "row " + num(r.value) + " failed";
            break;
          }
          if (!close(r.z_total, base->z_total, slack) || !close(r.z1, base->z1, slack) ||
              !close(r.buy_total, base->buy_total, slack)) {
            tc.pass = false;
            tc.detail = "row " + num(r.value) + " differs from the baseline";
            break;
          }
        }
      }
      out.push_back(tc);
      break;
    }
  }
  return out;
}

std::string sweep_to_csv(const SweepReport& rep) {
  std::size_t T = 0;
  for (const auto& r : rep.rows) T = std::max(T, r.buy.size());
  std::ostringstream os;
  os << "parameter,value,ok,status,z_total,z1,z2,z3,infeasibility,buy_total,sell_total,deviation1,deviation2,"
        "price_crossed,arbitrage";
  for (std::size_t t = 0; t < T; ++t) os << ",buy_t" << t;
  for (std::size_t t = 0; t < T; ++t) os << ",sell_t" << t;
  os << ",error\n";
  for (const auto& r : rep.rows) {
    os << to_string(rep.parameter) << ',' << num(r.value) << ',' << (r.ok ? 1 : 0) << ',' << to_string(r.status);
    if (r.ok) {
      for (double v : {r.z_total, r.z1, r.z2, r.z3, r.infeasibility, r.buy_total, r.sell_total, r.deviation1,
                       r.deviation2})
        os << ',' << num(v);
    } else {
      os << std::string(9, ',');
    }
    os << ',' << (r.price_crossed ? 1 : 0) << ',' << (r.arbitrage ? 1 : 0);
    for (std::size_t t = 0; t < T; ++t) os << ',' << (t < r.buy.size() ? num(r.buy[t]) : "");
    for (std::size_t t = 0; t < T; ++t) os << ',' << (t < r.sell.size() ? num(r.sell[t]) : "");
    std::string err = r.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    os << ",\"" << err << "\"\n";
  }
  return os.str();
}

std::string sweep_timing_csv(const SweepReport& rep) {
  std::ostringstream os;
  os << "parameter,value,z1_seconds,z2_seconds,z3_seconds,combined_seconds\n";
  for (const auto& r : rep.rows) {
    os << to_string(rep.parameter) << ',' << num(r.value);
    for (std::size_t k = 0; k < 4; ++k) os << ',' << (k < r.stage_seconds.size() ? num(r.stage_seconds[k]) : "");
    os << "\n";
  }
  return os.str();
}

RegimeComparison compare_regimes(const ProblemInstance& inst, const std::vector<double>& cap_scales,
                                 std::optional<double> penalty_rate, const SolveOptions& opt, std::size_t workers) {
  if (cap_scales.empty()) throw std::invalid_argument("cap value list is empty");
  for (double c : cap_scales)
    if (!std::isfinite(c) || c <= -1.0) throw std::invalid_argument("cap_scale values must be finite and exceed -1");
  if (penalty_rate && !(*penalty_rate >= 0.0)) throw std::invalid_argument("penalty rate must be non-negative");
  require_valid(inst);

  RegimeComparison cmp;
  cmp.rows.resize(cap_scales.size());
  StageCache cache;
  parallel_for(cap_scales.size(), resolve_workers(workers), [&](std::size_t k) {
    RegimeRow& row = cmp.rows[k];
    row.cap_scale = cap_scales[k];
    try {
      ProblemInstance trade = apply_parameter(inst, SweepParam::cap_scale, cap_scales[k]);
      trade.regime = Regime{};
      row.trade = full_solve(trade, opt, &cache);
      ProblemInstance pen = trade;
      pen.regime.kind = RegimeKind::penalty;
      pen.regime.penalty_rate = penalty_rate;
      SolveOptions popt = opt;
      popt.verify_sandwich = false;
      row.penalty = solve_combined(pen, row.trade.z1_star, row.trade.z2_star, row.trade.z3_star, popt);
      row.gap = row.penalty.z_total - row.trade.z_total;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  for (auto& row : cmp.rows)
    row.vanished = row.ok && std::abs(row.gap) <= 1e-4 * std::max(std::abs(row.trade.z_total), 1e-9);
  for (std::size_t k = cmp.rows.size(); k-- > 0;) {
    if (!cmp.rows[k].vanished) break;
    cmp.vanishing_cap = cmp.rows[k].cap_scale;
  }
  return cmp;
}

std::vector<TrendCheck> check_regimes(const RegimeComparison& cmp, double slack) {
  TrendCheck tc{"cap-and-trade z_total <= penalty z_total", true, ""};
  for (const auto& r : cmp.rows) {
    if (!r.ok) {
      tc.pass = false;
      tc.detail = "cap " + num(r.cap_scale) + " failed: " + r.error;
      break;
    }
    if (r.trade.z_total > r.penalty.z_total + slack * std::max(1.0, std::abs(r.penalty.z_total))) {
      tc.pass = false;
      tc.detail = "cap " + num(r.cap_scale) + ": " + num(r.trade.z_total) + " > " + num(r.penalty.z_total);
      break;
    }
  }
  return {tc};
}

std::string regimes_to_csv(const RegimeComparison& cmp) {
  std::ostringstream os;
  os << "cap_scale,ok,trade_z_total,penalty_z_total,gap,trade_z1,penalty_z1,trade_z2,penalty_z2,trade_z3,"
        "penalty_z3,trade_buy,trade_sell,penalty_excess,vanished,error\n";
  for (const auto& r : cmp.rows) {
    os << num(r.cap_scale) << ',' << (r.ok ? 1 : 0);
    if (r.ok) {
      for (double v : {r.trade.z_total, r.penalty.z_total, r.gap, r.trade.z1, r.penalty.z1, r.trade.z2, r.penalty.z2,
                       r.trade.z3, r.penalty.z3, r.trade.total_buy(), r.trade.total_sell(), r.penalty.total_buy()})
        os << ',' << num(v);
    } else {
      os << std::string(12, ',');
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    os << ',' << (r.vanished ? 1 : 0) << ",\"" << err << "\"\n";
  }
  return os.str();
}

}  // namespace gss
