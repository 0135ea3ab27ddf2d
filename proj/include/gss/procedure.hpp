#pragma once

// Two-step solution procedure: three individual optimisations, then the
// combined normalised-deviation solve.

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "gss/formulation.hpp"

namespace gss {

class ProcedureError : public std::runtime_error {
 public:
  ProcedureError(const std::string& what, SolveStatus status, std::vector<std::string> rows = {})
      : std::runtime_error(what), status_(status), rows_(std::move(rows)) {}
  SolveStatus status() const { return status_; }
  // For infeasible stages: an irreducible set of conflicting rows.
  const std::vector<std::string>& conflicting_rows() const { return rows_; }

 private:
  SolveStatus status_;
  std::vector<std::string> rows_;
};

struct SolveOptions {
  ModelOptions model;
  ToleranceConfig tol;
  // Threads for the three independent first-stage solves.
  std::size_t workers = 1;
  // Reject a combined solution that beats an individual optimum. Off only
  // when the reference optima come from a different model.
  bool verify_sandwich = true;
};

struct StageStats {
  std::string name;
  SolveStatus status = SolveStatus::numerical_failure;
  double objective = 0.0;
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  double best_bound = 0.0;
  double rel_gap = 0.0;
  double seconds = 0.0;  // wall clock; excluded from deterministic output
  std::vector<std::string> active_guards;
};

struct IndividualResult {
  double optimum = 0.0;
  MilpSolution solution;
  StageStats stats;
};

struct SolveReport {
  double z1_star = 0.0, z2_star = 0.0, z3_star = 0.0;
  double z1 = 0.0, z2 = 0.0, z3 = 0.0, z_total = 0.0;
  Arr3 x;                     // [i][j][t]
  Arr2 r, b;                  // [i][t]
  Vec1 buy, sell;             // [t]
  Vec1 sell_price, buy_price; // [t]
  Arr4 q, W;                  // [j][t][k][n]
  Arr4 delta_plus, delta_minus;  // [i][j][t][s]
  Vec1 theta1, theta2;        // [s]
  Vec1 xi1, xi2;              // [s]
  SolveStatus status = SolveStatus::numerical_failure;
  RegimeKind regime = RegimeKind::cap_and_trade;

  std::vector<StageStats> stages;  // z1, z2, z3, combined
  std::map<std::string, double> overrides;  // parameters overridden on top of the instance

  // Probability-weighted infeasibility: sum_s Pr_s * sum (delta+ + delta-).
  double total_infeasibility(const ProblemInstance& inst) const;
  // sum_s Pr_s |xi^s - mean|.
  double deviation1(const ProblemInstance& inst) const;
  double deviation2(const ProblemInstance& inst) const;
  double total_buy() const;
  double total_sell() const;
};

// Reuses first-stage optima across solves whose inputs to that stage agree.
// Thread-safe.
class StageCache {
 public:
  bool lookup(const std::string& key, IndividualResult& out) const;
  void store(const std::string& key, const IndividualResult& r);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, IndividualResult> entries_;
};

// which: 1 = robust cost (min), 2 = robust emission (min), 3 = quality (max).
IndividualResult solve_individual(const ProblemInstance& inst, int which, const SolveOptions& opt = {},
                                  StageCache* cache = nullptr);

SolveReport solve_combined(const ProblemInstance& inst, double z1_star, double z2_star, double z3_star,
                           const SolveOptions& opt = {});

SolveReport full_solve(const ProblemInstance& inst, const SolveOptions& opt = {}, StageCache* cache = nullptr);

// Structured-text and flat CSV forms. Wall-clock timings are left out unless
// requested so that repeated runs produce identical bytes.
std::string report_to_json(const SolveReport& rep, bool include_timing = false);
std::string report_to_csv(const SolveReport& rep);
std::string stage_timing_summary(const SolveReport& rep);

// Irreducible set of rows that are jointly infeasible with the variable
// bounds (deletion filter). Empty when the model is feasible.
std::vector<std::string> conflicting_rows(const MilpModel& model, const ToleranceConfig& tol = {});

}  // namespace gss
