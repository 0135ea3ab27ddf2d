#pragma once

// Solver-agnostic linear model plus the bundled LP/MILP solver.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gss {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using VarId = std::size_t;

enum class VarKind { continuous, binary };
enum class RowSense { le, eq, ge };
enum class ObjSense { minimize, maximize };

struct Variable {
  VarId id = 0;
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarKind kind = VarKind::continuous;
};

struct Term {
  VarId var = 0;
  double coef = 0.0;
};

// Sparse linear expression. Terms may repeat while building; normalize()
// merges them (in first-appearance order) and drops exact zeros.
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(double constant) : constant_(constant) {}

  LinearExpr& add(VarId v, double coef) {
    terms_.push_back({v, coef});
    return *this;
  }
  LinearExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }
  LinearExpr& add(const LinearExpr& other, double scale = 1.0);

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  void normalize();
  double evaluate(const std::vector<double>& values) const;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

struct LinearConstraint {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::le;
  double rhs = 0.0;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MilpModel {
 public:
  VarId add_variable(std::string name, double lower, double upper, VarKind kind = VarKind::continuous);
  VarId add_binary(std::string name) { return add_variable(std::move(name), 0.0, 1.0, VarKind::binary); }

  // The expression's constant moves to the right-hand side.
  std::size_t add_constraint(std::string name, LinearExpr expr, RowSense sense, double rhs);

  void set_objective(LinearExpr expr, ObjSense sense);
  void set_bounds(VarId v, double lower, double upper);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<LinearConstraint>& constraints() const { return rows_; }
  const LinearExpr& objective() const { return objective_; }
  ObjSense sense() const { return sense_; }
  std::size_t num_binaries() const;

  // Throws ModelError on dangling references, non-finite coefficients,
  // inverted bounds or binaries outside [0, 1].
  void validate() const;

 private:
  std::vector<Variable> vars_;
  std::vector<LinearConstraint> rows_;
  LinearExpr objective_;
  ObjSense sense_ = ObjSense::minimize;
};

struct ToleranceConfig {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  double integrality_tol = 1e-6;
  double rel_gap = 1e-6;
  double abs_gap = 1e-9;
  std::size_t node_limit = 200000;
};

enum class SolveStatus { optimal, infeasible, unbounded, gap_limit, node_limit, numerical_failure };

const char* to_string(SolveStatus s);

struct BranchStats {
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  double best_bound = std::nan("");
  double rel_gap = std::nan("");
};

struct MilpSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  double objective = std::nan("");
  std::vector<double> values;
  BranchStats stats;
  // Dual objective recomputed from the final basis (LP solves and the final
  // LP of a branch-and-bound run).
  double dual_objective = std::nan("");

  bool has_solution() const {
    return status == SolveStatus::optimal || status == SolveStatus::gap_limit;
  }
};

// Binaries are relaxed to [0, 1].
MilpSolution solve_lp(const MilpModel& model, const ToleranceConfig& tol = {});

// Best-first branch and bound on the most fractional binary.
MilpSolution solve_milp(const MilpModel& model, const ToleranceConfig& tol = {});

// Independent constraint/bound evaluator; shares no code with the simplex.
struct FeasibilityReport {
  double max_violation = 0.0;
  std::string worst;  // row or variable name of the largest violation
  bool ok(double tol) const { return max_violation <= tol; }
};

FeasibilityReport check_feasibility(const MilpModel& model, const std::vector<double>& values,
                                    double integrality_tol = 1e-6);

struct MpsExport {
  std::string mps;
  std::string name_map;  // "<mps name> <model name>" per line, columns then rows
  std::vector<std::string> column_names;
  std::vector<std::string> row_names;
};

// Fixed-format MPS with MARKER lines around binaries; names are shortened to
// eight characters and made unique.
MpsExport export_mps(const MilpModel& model, const std::string& model_name = "GSSMODEL");

}  // namespace gss
