#pragma once

// Bounded-variable dense-tableau simplex. Internal to the solver library.
//
// Every model variable becomes one or two columns with a finite lower bound
// (free variables are split, upper-bounded-only variables are negated). Each
// inequality row gets a slack column, every row an artificial column for
// phase 1. Rows are scaled by their largest structural coefficient, then
// columns by powers of two to a unit max entry, then the objective by its
// largest coefficient; reported values are unscaled.

#include <cstdint>
#include <vector>

#include "gss/milp.hpp"

namespace gss::detail {

enum class LpResult { optimal, infeasible, unbounded, failure };

class SimplexEngine {
 public:
  SimplexEngine(const MilpModel& model, const ToleranceConfig& tol);

  // Two-phase primal simplex from a slack/artificial starting basis.
  LpResult solve();

  // After bound changes: dual simplex from the current basis (which stays
  // dual feasible under bound changes), then a primal clean-up pass.
  LpResult reoptimize();

  // Only valid for variables that map onto a single unnegated column, which
  // holds for every variable with a finite lower bound (all binaries).
  void set_bounds(VarId v, double lower, double upper);

  double objective() const;  // model units and sense, including the constant
  std::vector<double> values() const;

  // Dual bound from the current basis: y solves B^T y = c_B by a fresh dense
  // LU of the basis columns, independent of the tableau.
  double dual_objective() const;

  std::size_t iterations() const { return iterations_; }

 private:
  enum class Status : std::uint8_t { basic, at_lower, at_upper };

  double* row(std::size_t i) { return &tab_[i * stride_]; }
  const double* row(std::size_t i) const { return &tab_[i * stride_]; }
  double value_of(std::size_t j) const;

  void build_initial_basis();
  bool refactor();
  void pivot(std::size_t r, std::size_t q);
  void recompute_reduced_costs();
  bool make_dual_feasible();
  bool residuals_ok() const;
  void remove_row(std::size_t r);

  LpResult primal();
  LpResult dual();
  LpResult finish_phase1();
  LpResult phase2_from_current();

  const ToleranceConfig tol_;

  // model -> column mapping
  std::vector<std::int64_t> col_pos_, col_neg_;
  std::vector<double> col_scale_;  // structural columns only
  double obj_scale_ = 1.0;
  double obj_sign_ = 1.0;
  double obj_const_ = 0.0;
  std::size_t num_model_vars_ = 0;

  // original scaled rows (structural + slack entries)
  std::vector<std::vector<std::pair<std::size_t, double>>> orig_rows_;
  std::vector<double> orig_rhs_;
  std::vector<double> art_sign_;
  bool trivially_infeasible_ = false;

  std::size_t n_struct_ = 0, n_slack_ = 0, n_total_ = 0;
  std::size_t stride_ = 0, width_ = 0, m_ = 0;

  std::vector<double> lo_, hi_, cost_, phase1_cost_;
  const std::vector<double>* cur_cost_ = nullptr;
  std::vector<Status> status_;
  std::vector<std::size_t> head_;      // basic column per tableau row
  std::vector<std::size_t> orig_row_;  // original row per tableau row
  std::vector<double> beta_;           // basic values
  std::vector<double> d_;              // reduced costs
  std::vector<double> tab_;

  std::vector<std::size_t> nz_;  // scratch: pivot-row support
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
  std::size_t iteration_limit_ = 0;
  bool phase1_done_ = false;
};

}  // namespace gss::detail
