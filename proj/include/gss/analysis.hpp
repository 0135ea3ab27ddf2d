#pragma once

// Parameter sweeps over the two-step procedure, with trend checks.

#include <optional>
#include <string>
#include <vector>

#include "gss/procedure.hpp"

namespace gss {

enum class SweepParam { omega, lambda1, lambda2, cap_scale, bp_scale, sp_scale };

const char* to_string(SweepParam p);
// Throws std::invalid_argument for unknown names.
SweepParam parse_sweep_param(const std::string& name);

struct SweepSpec {
  SweepParam parameter = SweepParam::omega;
  std::vector<double> values;
  ProblemInstance base;
  SolveOptions options;
  // Sweep points evaluated concurrently; 0 means "read GSS_WORKERS, else 1".
  std::size_t workers = 0;

  // Throws std::invalid_argument on an empty or non-finite value list, or a
  // scale factor <= -1.
  void validate() const;
};

// Copy of `base` with one parameter set (robustness weights) or scaled
// (cap and offer prices, multiplied by 1 + value).
ProblemInstance apply_parameter(const ProblemInstance& base, SweepParam p, double value);

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  std::string error;
  SolveStatus status = SolveStatus::numerical_failure;
  double z_total = 0.0, z1 = 0.0, z2 = 0.0, z3 = 0.0;
  double infeasibility = 0.0;  // sum_s Pr_s sum (delta+ + delta-)
  double buy_total = 0.0, sell_total = 0.0;
  double deviation1 = 0.0, deviation2 = 0.0;
  std::vector<double> buy, sell;  // per period
  bool price_crossed = false;  // some period has max buyer offer > min seller offer
  bool arbitrage = false;
  std::vector<double> stage_seconds;
  std::vector<std::string> stage_status;
};

struct SweepReport {
  SweepParam parameter = SweepParam::omega;
  std::vector<SweepRow> rows;  // input order
};

SweepRow row_from_report(double value, const ProblemInstance& inst, const SolveReport& rep);

SweepReport sweep(const SweepSpec& spec, StageCache* cache = nullptr);
SweepReport sweep_cap(const SweepSpec& spec, StageCache* cache = nullptr);
SweepReport sweep_prices(const SweepSpec& spec, StageCache* cache = nullptr);

// True when some period offers a buyer price above the lowest seller price
// and every such period trades at the market depth bound in both directions.
bool arbitrage_flag(const ProblemInstance& inst, const SolveReport& rep);

struct TrendCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Weak monotone trends asserted for the swept parameter, with ties allowed
// at `slack` (relative to max(1, |value|)).
std::vector<TrendCheck> check_trends(const SweepReport& rep, double slack = 1e-6);

// Deterministic CSV (no timings) and a separate timing CSV.
std::string sweep_to_csv(const SweepReport& rep);
std::string sweep_timing_csv(const SweepReport& rep);

struct RegimeRow {
  double cap_scale = 0.0;
  bool ok = false;
  std::string error;
  SolveReport trade;
  SolveReport penalty;
  double gap = 0.0;  // penalty z_total - trade z_total
  bool vanished = false;
};

struct RegimeComparison {
  std::vector<RegimeRow> rows;
  // First cap value (in input order) from which every later gap is within
  // 1e-4 * |z_total|; unset when the gap never vanishes.
  std::optional<double> vanishing_cap;
};

// Per cap value, solves the instance under cap-and-trade and under the
// penalty regime. Both combined solves are normalised by the cap-and-trade
// individual optima so their z_total values share one yardstick.
RegimeComparison compare_regimes(const ProblemInstance& inst, const std::vector<double>& cap_scales,
                                 std::optional<double> penalty_rate, const SolveOptions& opt = {},
                                 std::size_t workers = 0);

std::vector<TrendCheck> check_regimes(const RegimeComparison& cmp, double slack = 1e-6);

std::string regimes_to_csv(const RegimeComparison& cmp);

// Scalable vector charts of the key columns, one panel per column.
std::string sweep_chart_svg(const SweepReport& rep);
std::string regimes_chart_svg(const RegimeComparison& cmp);

// Worker count from GSS_WORKERS (>= 1), defaulting to 1.
std::size_t default_workers();

}  // namespace gss
