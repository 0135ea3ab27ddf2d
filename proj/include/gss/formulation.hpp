#pragma once

// Compiles a ProblemInstance into the robust multi-objective MILP.

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gss/domain.hpp"
#include "gss/instance.hpp"
#include "gss/milp.hpp"

namespace gss {

class FormulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for a combined model whose reference optima cannot normalise.
class NormalizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ObjectiveMode { cost_robust, emission_robust, quality, combined };

const char* to_string(ObjectiveMode m);

struct ReferenceOptima {
  double z1 = std::numeric_limits<double>::quiet_NaN();
  double z2 = std::numeric_limits<double>::quiet_NaN();
  double z3 = std::numeric_limits<double>::quiet_NaN();
};

// Switches between the default, well-posed model and a literal reading of the
// constraint set.
struct ModelOptions {
  // Prepend a zero load breakpoint so a supplier can receive no order.
  bool zero_breakpoint = true;
  // Apply the load identity per echelon (true) or as one double sum over both.
  bool per_echelon = true;
  // At most one echelon carries a supplier's load in a period.
  bool exclusive_echelon = true;

  // Throws FormulationError on contradictory flags.
  void validate() const;
};

inline constexpr VarId kNoVar = std::numeric_limits<VarId>::max();

using VarArr1 = NdArray<VarId, 1>;
using VarArr2 = NdArray<VarId, 2>;
using VarArr3 = NdArray<VarId, 3>;
using VarArr4 = NdArray<VarId, 4>;

struct VariableMap {
  VarArr3 x;        // [i][j][t]
  VarArr2 r;        // [i][t] storage at end of t
  VarArr2 b;        // [i][t] backorder at end of t
  VarArr1 buy;      // [t] allowance bought (excess emission in the penalty regime)
  VarArr1 sell;     // [t] allowance sold (fixed at zero in the penalty regime)
  VarArr4 q;        // [j][t][k][n] load segment selector, binary
  VarArr4 W;        // [j][t][k][n] breakpoint weights
  VarArr2 echelon;  // [j][t] 1 when the buyer echelon transports (exclusive mode only)
  VarArr4 delta_plus;   // [i][j][t][s]
  VarArr4 delta_minus;  // [i][j][t][s]
  VarArr1 theta1, theta2;  // [s], empty when the mode has no such deviation
  VarArr1 zeta1, zeta2;    // [s], free per-scenario objective values

  // Load breakpoints actually used (with the zero point when enabled) and the
  // truck category charged for each segment selector q[.][.][k][.].
  std::vector<double> breakpoints;
  std::vector<std::size_t> truck_of_segment;

  // Per-period unit price of buy[t] and unit revenue of sell[t] in the cost.
  std::vector<double> buy_cost;
  std::vector<double> sell_revenue;
  RegimeKind regime = RegimeKind::cap_and_trade;
};

// Expressions kept alongside the model for reporting.
struct ObjectiveExprs {
  std::vector<LinearExpr> xi1;  // per-scenario cost
  std::vector<LinearExpr> xi2;  // per-scenario emission
  LinearExpr z3;                // quality
  LinearExpr z1;                // robust cost (needs zeta1/theta1)
  LinearExpr z2;                // robust emission (needs zeta2/theta2)
};

struct BuiltModel {
  MilpModel model;
  VariableMap vars;
  ObjectiveExprs exprs;
  ObjectiveMode mode = ObjectiveMode::cost_robust;
};

// Creates every decision variable with its bounds; no rows.
VariableMap create_variables(const ProblemInstance& inst, const ModelOptions& opt, MilpModel& model);

LinearExpr build_scenario_cost(const ProblemInstance& inst, std::size_t s, const VariableMap& vars);
LinearExpr build_scenario_emission(const ProblemInstance& inst, std::size_t s, const VariableMap& vars);
LinearExpr build_quality(const ProblemInstance& inst, const VariableMap& vars);

// Emission of period t under scenario s (transport, production, remanufacturing).
LinearExpr build_period_emission(const ProblemInstance& inst, std::size_t t, std::size_t s,
                                 const VariableMap& vars);

void add_core_constraints(const ProblemInstance& inst, const ModelOptions& opt, const VariableMap& vars,
                          MilpModel& model);

// Links zeta to `xi` with equality rows, adds the deviation rows and returns
// mean + lambda * deviation + omega * infeasibility. `which` is 1 or 2.
LinearExpr build_robust_objective(const ProblemInstance& inst, int which, const std::vector<LinearExpr>& xi,
                                  VariableMap& vars, MilpModel& model);

BuiltModel build_full_model(const ProblemInstance& inst, ObjectiveMode mode, const ModelOptions& opt = {},
                            const ReferenceOptima& ref = {});

// Same model under the penalty regime with the given rate (unset: per-period
// best buying price).
BuiltModel build_penalty_regime_model(const ProblemInstance& inst, std::optional<double> penalty_rate,
                                      ObjectiveMode mode, const ModelOptions& opt = {},
                                      const ReferenceOptima& ref = {});

// Names of boundedness guards that are tight at `values`.
std::vector<std::string> active_guards(const ProblemInstance& inst, const BuiltModel& built,
                                       const std::vector<double>& values);

}  // namespace gss
