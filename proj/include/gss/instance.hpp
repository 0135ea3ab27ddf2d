#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gss/domain.hpp"

namespace gss {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct UniformRange {
  double low = 0.0;
  double high = 0.0;

  bool operator==(const UniformRange&) const = default;
};

// Sampling recipe for random instances. Per-scenario lists hold one range per
// scenario; per-truck lists hold one range per truck category (and, for
// transport cost, one per echelon inside it).
struct GeneratorConfig {
  std::uint64_t seed = 1;
  Dimensions dims;

  double interest_rate = 0.04;
  double lambda1 = 15.0;
  double lambda2 = 15.0;
  double omega = 50.0;
  double market_depth_bound = 1.0e4;
  std::vector<double> probabilities{0.2, 0.6, 0.2};
  std::vector<double> truck_breakpoints{3000.0, 6000.0, 14000.0};

  std::vector<UniformRange> purchase_cost{{10, 23}, {11.5, 26}, {13, 30}};
  UniformRange holding_cost{28, 35};
  UniformRange backorder_cost{33, 41};
  std::vector<UniformRange> delay_days{{0, 5}, {0, 5}, {0, 5}};
  UniformRange delay_penalty{6, 12};
  std::vector<UniformRange> reject_rate{{0.03, 0.092}, {0.035, 0.126}, {0.04, 0.145}};
  std::vector<UniformRange> collect_rate{{0.02, 0.08}, {0.023, 0.092}, {0.027, 0.105}};
  std::vector<UniformRange> usable_rejected{{0.6, 0.9}, {0.62, 0.93}, {0.63, 0.94}};
  std::vector<UniformRange> reusable_collected{{0.6, 0.9}, {0.72, 0.93}, {0.73, 0.94}};
  UniformRange reject_loss{5, 11};
  UniformRange seller_offers{4000, 4020};
  UniformRange buyer_offers{3980, 4000};
  UniformRange disassembly_cost{4, 7};
  UniformRange remanufacture_cost{10, 17};
  UniformRange disposal_cost{3, 5};
  // transport_cost[k] = {supplier echelon range, buyer echelon range}
  std::vector<std::vector<UniformRange>> transport_cost{
      {{28, 37}, {29, 38}}, {{35, 40}, {36, 41}}, {{39, 52}, {40, 53}}};
  std::vector<UniformRange> demand{{2500, 4600}, {2930, 4760}, {3070, 4990}};
  UniformRange distance{3, 7};
  std::vector<UniformRange> transport_emission{{0.29, 0.37}, {0.33, 0.46}, {0.41, 0.49}};
  UniformRange production_emission{0.006, 0.012};
  UniformRange remanufacture_emission{0.006, 0.012};
  UniformRange score_em{1, 10};
  UniformRange score_gp{1, 10};
  UniformRange score_re{1, 10};
  UniformRange score_pt{1, 10};
  UniformRange emission_cap{170, 200};

  bool operator==(const GeneratorConfig&) const = default;

  // Default recipe resized to other dimensions: per-scenario and per-truck
  // lists repeat their last entry, probabilities become uniform when S != 3,
  // and breakpoints extend by doubling the last one.
  static GeneratorConfig for_dims(const Dimensions& dims, std::uint64_t seed = 1);
};

// Throws ConfigError naming the first offending field.
void validate_config(const GeneratorConfig& cfg);

ProblemInstance generate_instance(const GeneratorConfig& cfg);

// Applies P[t+1] = P[t] * (1 + ir) to C, h, f, G, O, DC, RC, DP and TC from
// the first-period values. Throws DataError if already applied.
ProblemInstance propagate_interest(const ProblemInstance& inst);

struct TradePrices {
  std::vector<double> sell_price;  // best price the manufacturer can sell at: max buyer offer
  std::vector<double> buy_price;   // best price the manufacturer can buy at: min seller offer
};

TradePrices derive_trade_prices(const ProblemInstance& inst);

// JSON document I/O. load_* throw SchemaError on malformed documents, unknown
// keys or dimension mismatches.
std::string instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const std::string& text);
void save_instance(const ProblemInstance& inst, const std::filesystem::path& path);
ProblemInstance load_instance(const std::filesystem::path& path);

std::string config_to_json(const GeneratorConfig& cfg);
GeneratorConfig config_from_json(const std::string& text);
GeneratorConfig load_config(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gss
