#pragma once

// Problem data for robust green supplier selection and order allocation in a
// closed-loop supply chain. All index families are zero-based in code:
//   i product, j supplier, t period, k truck category, n echelon (0 = supplier
//   trucks, 1 = buyer/manufacturer trucks), s scenario, m market offer.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gss/ndarray.hpp"

namespace gss {

inline constexpr std::size_t kEchelons = 2;
inline constexpr std::size_t kSupplierEchelon = 0;
inline constexpr std::size_t kBuyerEchelon = 1;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dimensions {
  std::size_t products = 4;       // I
  std::size_t suppliers = 5;      // J
  std::size_t periods = 4;        // T
  std::size_t truck_types = 3;    // K
  std::size_t scenarios = 3;      // S
  std::size_t market_offers = 3;  // M

  bool operator==(const Dimensions&) const = default;
};

struct ScenarioData {
  double probability = 0.0;
  Arr3 purchase_cost;       // C[i][j][t]
  Arr2 delay_days;          // L[j][t]
  Arr2 reject_rate;         // e[i][t]
  Arr2 collect_rate;        // p[i][t]
  Arr2 usable_rejected;     // u[i][t]
  Arr2 reusable_collected;  // v[i][t]
  Arr2 demand;              // DE[i][t]

  bool operator==(const ScenarioData&) const = default;
};

struct DeterministicParams {
  double interest_rate = 0.0;   // ir
  Arr2 holding_cost;            // h[i][t]
  Arr2 backorder_cost;          // f[i][t]
  Arr3 delay_penalty;           // G[i][j][t]
  Arr3 reject_loss;             // O[i][j][t]
  Arr2 seller_offers;           // SP[t][m]
  Arr2 buyer_offers;            // BP[t][m]
  Arr2 disassembly_cost;        // DC[i][t]
  Arr2 remanufacture_cost;      // RC[i][t]
  Arr2 disposal_cost;           // DP[i][t]
  Arr4 transport_cost;          // TC[j][t][k][n]
  Vec1 distance;                // d[j]
  Arr4 transport_emission;      // CET[j][t][k][n]
  Arr3 production_emission;     // CEP[i][j][t]
  Arr2 remanufacture_emission;  // CER[i][t]
  Arr3 score_em;                // EM[i][j][t], environmental management
  Arr3 score_gp;                // GP[i][j][t], green product
  Arr3 score_re;                // RE[i][j][t], recyclability
  Arr3 score_pt;                // PT[i][j][t], toxicity
  Vec1 emission_cap;            // CAP[t]
  Vec1 truck_breakpoints;       // M[k]
  // Set once the interest-rate growth has been applied to the priced
  // families; guards against compounding twice.
  bool prices_propagated = false;

  bool operator==(const DeterministicParams&) const = default;
};

struct RobustParams {
  double lambda1 = 15.0;
  double lambda2 = 15.0;
  double omega = 50.0;
  double market_depth_bound = 1.0e4;

  bool operator==(const RobustParams&) const = default;
};

enum class RegimeKind { cap_and_trade, penalty };

struct Regime {
  RegimeKind kind = RegimeKind::cap_and_trade;
  // Penalty per unit of emission above the cap. Unset means "use the
  // per-period best buying price", which puts both regimes on the same
  // marginal emission cost.
  std::optional<double> penalty_rate;

  bool operator==(const Regime&) const = default;
};

struct ProblemInstance {
  Dimensions dims;
  std::vector<ScenarioData> scenarios;
  DeterministicParams det;
  RobustParams robust;
  Regime regime;

  bool operator==(const ProblemInstance&) const = default;
};

// Allocates every array of an instance to the shapes implied by `dims`,
// zero-filled. Probabilities are left at zero.
ProblemInstance make_empty_instance(const Dimensions& dims);

struct Violation {
  std::string field;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
  bool operator==(const ValidationReport&) const = default;
};

ValidationReport validate_instance(const ProblemInstance& inst);

// Throws DataError carrying the report summary when the instance is invalid.
void require_valid(const ProblemInstance& inst);

}  // namespace gss
