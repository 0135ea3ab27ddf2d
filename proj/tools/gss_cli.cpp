// Command-line frontend: gen, solve, sweep, compare-regimes, export-mps.
//
// Exit codes: 0 success, 2 configuration or flag error, 3 infeasible,
// 4 unbounded after guards, 5 numerical failure, 6 trend check failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gss/analysis.hpp"
#include "gss/formulation.hpp"
#include "gss/instance.hpp"
#include "gss/procedure.hpp"

namespace {

using namespace gss;

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitUnbounded = 4;
constexpr int kExitNumerical = 5;
constexpr int kExitTrend = 6;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::infeasible: return kExitInfeasible;
    case SolveStatus::unbounded: return kExitUnbounded;
    default: return kExitNumerical;
  }
}

std::vector<double> parse_values(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": '" + item + "' is not a number");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw UsageError(std::string(flag) + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(flag) + " needs at least one value");
  return out;
}

// Flags shared by every command that solves.
struct SolveFlags {
  double rel_gap = 1e-6;
  double feasibility_tol = 1e-7;
  double integrality_tol = 1e-6;
  std::size_t node_limit = 200000;
  std::string tol_config;
  bool no_zero_breakpoint = false;
  bool literal_echelon_sum = false;
  bool no_exclusive_echelon = false;
  std::size_t workers = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--rel-gap", rel_gap, "relative optimality gap for branch and bound");
    cmd->add_option("--feasibility-tol", feasibility_tol, "primal feasibility tolerance");
    cmd->add_option("--integrality-tol", integrality_tol, "integrality tolerance");
    cmd->add_option("--node-limit", node_limit, "branch-and-bound node limit per solve");
    cmd->add_option("--tol-config", tol_config,
                    "JSON file with any of feasibility_tol, integrality_tol, rel_gap, node_limit (flags win)");
    cmd->add_flag("--no-zero-breakpoint", no_zero_breakpoint,
                  "drop the zero load breakpoint (every supplier must then receive an order)");
    cmd->add_flag("--literal-echelon-sum", literal_echelon_sum,
                  "one load identity summed over both echelons instead of one per echelon");
    cmd->add_flag("--no-exclusive-echelon", no_exclusive_echelon,
                  "allow both echelons to carry a supplier's load in the same period");
    cmd->add_option("--workers", workers, "worker threads (default: GSS_WORKERS or 1)");
  }

  SolveOptions resolve(const CLI::App* cmd) const {
    SolveOptions o;
    if (!tol_config.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_text_file(tol_config));
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("--tol-config: " + std::string(e.what()));
      }
      for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (!it->is_number()) throw UsageError("--tol-config: " + k + " must be a number");
        if (k == "feasibility_tol") o.tol.feasibility_tol = it->get<double>();
        else if (k == "integrality_tol") o.tol.integrality_tol = it->get<double>();
        else if (k == "rel_gap") o.tol.rel_gap = it->get<double>();
        else if (k == "node_limit") o.tol.node_limit = it->get<std::size_t>();
        else throw UsageError("--tol-config: unknown key " + k);
      }
    }
    if (cmd->count("--rel-gap")) o.tol.rel_gap = rel_gap;
    if (cmd->count("--feasibility-tol")) o.tol.feasibility_tol = feasibility_tol;
    if (cmd->count("--integrality-tol")) o.tol.integrality_tol = integrality_tol;
    if (cmd->count("--node-limit")) o.tol.node_limit = node_limit;
    if (!(o.tol.rel_gap >= 0.0)) throw UsageError("rel_gap must be >= 0");
    if (!(o.tol.feasibility_tol > 0.0)) throw UsageError("feasibility_tol must be > 0");
    if (!(o.tol.integrality_tol > 0.0 && o.tol.integrality_tol < 0.5))
      throw UsageError("integrality_tol must lie in (0, 0.5)");
    if (o.tol.node_limit == 0) throw UsageError("node_limit must be >= 1");
    o.model.zero_breakpoint = !no_zero_breakpoint;
    o.model.per_echelon = !literal_echelon_sum;
    o.model.exclusive_echelon = !no_exclusive_echelon;
    try {
      o.model.validate();
    } catch (const FormulationError& e) {
      throw UsageError(std::string("contradictory fidelity flags: ") + e.what() +
                       " (add --no-exclusive-echelon)");
    }
    o.workers = workers == 0 ? default_workers() : workers;
    return o;
  }
};

struct RobustFlags {
  std::optional<double> omega, lambda1, lambda2;

  void attach(CLI::App* cmd) {
    cmd->add_option("--omega", omega, "override the infeasibility penalty weight");
    cmd->add_option("--lambda1", lambda1, "override the cost deviation weight");
    cmd->add_option("--lambda2", lambda2, "override the emission deviation weight");
  }

  std::map<std::string, double> apply(ProblemInstance& inst) const {
    std::map<std::string, double> echoed;
    auto set = [&](const std::optional<double>& v, double& field, const char* name) {
      if (!v) return;
      if (!(*v >= 0.0)) throw UsageError(std::string("--") + name + " must be >= 0");
      field = *v;
      echoed[name] = *v;
    };
    set(omega, inst.robust.omega, "omega");
    set(lambda1, inst.robust.lambda1, "lambda1");
    set(lambda2, inst.robust.lambda2, "lambda2");
    return echoed;
  }
};

ProblemInstance load_valid_instance(const std::string& path) {
  ProblemInstance inst = load_instance(path);
  require_valid(inst);
  return inst;
}

void print_checks(const std::vector<TrendCheck>& checks, bool& all_pass) {
  for (const auto& c : checks) {
    std::cout << c.name << ": " << (c.pass ? "PASS" : "FAIL");
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
    all_pass = all_pass && c.pass;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust green supplier selection under cap-and-trade"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random instance");
  std::uint64_t seed = 1;
  std::string config_path, gen_out;
  gen->add_option("--seed", seed, "random seed (overrides the config file's seed)");
  gen->add_option("--config", config_path, "generator config (JSON)");
  gen->add_option("--out", gen_out, "instance file to write")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "run the two-step procedure");
  std::string inst_path, report_path, csv_path, regime_name = "cap-and-trade";
  std::optional<double> penalty_rate;
  bool timing = false;
  SolveFlags solve_flags;
  RobustFlags robust_flags;
  solve->add_option("--instance", inst_path, "instance file")->required();
  solve->add_option("--report", report_path, "report file to write (JSON)")->required();
  solve->add_option("--csv", csv_path, "also write the report as flat CSV");
  solve->add_option("--regime", regime_name, "cap-and-trade or penalty")
      ->check(CLI::IsMember({"cap-and-trade", "penalty"}));
  solve->add_option("--penalty-rate", penalty_rate, "penalty per unit of excess emission (default: buying price)");
  solve->add_flag("--timing", timing, "include wall-clock stage timings in the report");
  solve_flags.attach(solve);
  robust_flags.attach(solve);

  // sweep
  auto* sw = app.add_subcommand("sweep", "sweep one parameter and check its trends");
  std::string sweep_param, sweep_values, sweep_inst, sweep_csv, sweep_chart, sweep_timing;
  SolveFlags sweep_flags;
  RobustFlags sweep_robust;
  sw->add_option("--param", sweep_param, "omega, lambda1, lambda2, cap_scale, bp_scale or sp_scale")->required();
  sw->add_option("--values", sweep_values, "comma-separated values")->required();
  sw->add_option("--instance", sweep_inst, "instance file")->required();
  sw->add_option("--out-csv", sweep_csv, "CSV file to write");
  sw->add_option("--chart", sweep_chart, "SVG chart to write");
  sw->add_option("--timing-csv", sweep_timing, "per-stage timings CSV to write");
  sweep_flags.attach(sw);
  sweep_robust.attach(sw);

  // compare-regimes
  auto* cr = app.add_subcommand("compare-regimes", "cap-and-trade vs penalty across cap reductions");
  std::string cr_caps, cr_inst, cr_csv, cr_chart;
  std::optional<double> cr_rate;
  SolveFlags cr_flags;
  RobustFlags cr_robust;
  cr->add_option("--caps", cr_caps, "comma-separated cap scale factors, e.g. 0,-0.1,-0.2")->required();
  cr->add_option("--instance", cr_inst, "instance file")->required();
  cr->add_option("--penalty-rate", cr_rate, "penalty per unit of excess emission (default: buying price)");
  cr->add_option("--out-csv", cr_csv, "paired CSV file to write");
  cr->add_option("--chart", cr_chart, "SVG chart to write");
  cr_flags.attach(cr);
  cr_robust.attach(cr);

  // export-mps
  auto* ex = app.add_subcommand("export-mps", "write one model in MPS format");
  std::string ex_inst, ex_mode, ex_out, ex_report;
  SolveFlags ex_flags;
  RobustFlags ex_robust;
  ex->add_option("--instance", ex_inst, "instance file")->required();
  ex->add_option("--mode", ex_mode, "cost, emission, quality or combined")->required();
  ex->add_option("--out", ex_out, "MPS file to write (name map goes to <out>.names)")->required();
  ex->add_option("--report", ex_report, "solve report supplying z1*, z2*, z3* for mode combined");
  ex_flags.attach(ex);
  ex_robust.attach(ex);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen) {
      GeneratorConfig cfg = config_path.empty() ? GeneratorConfig{} : load_config(config_path);
      if (gen->count("--seed")) cfg.seed = seed;
      validate_config(cfg);
      const ProblemInstance inst = generate_instance(cfg);
      save_instance(inst, gen_out);
      std::cout << "wrote " << gen_out << " (seed " << cfg.seed << ")\n";
      return 0;
    }

    if (*solve) {
      const SolveOptions opt = solve_flags.resolve(solve);
      ProblemInstance inst = load_valid_instance(inst_path);
      auto overrides = robust_flags.apply(inst);
      if (regime_name == "penalty") {
        inst.regime.kind = RegimeKind::penalty;
        if (penalty_rate) inst.regime.penalty_rate = penalty_rate;
      } else if (penalty_rate) {
        throw UsageError("--penalty-rate needs --regime penalty");
      }
      if (inst.regime.penalty_rate && *inst.regime.penalty_rate < 0.0)
        throw UsageError("--penalty-rate must be >= 0");
      require_valid(inst);
      SolveReport rep = full_solve(inst, opt);
      rep.overrides = overrides;
      write_text_file(report_path, report_to_json(rep, timing));
      if (!csv_path.empty()) write_text_file(csv_path, report_to_csv(rep));
      std::cout << stage_timing_summary(rep);
      std::cout.precision(10);
      std::cout << "z1 " << rep.z1 << "  z2 " << rep.z2 << "  z3 " << rep.z3 << "  z_total " << rep.z_total << "\n";
      std::cout << "wrote " << report_path << "\n";
      return 0;
    }

    if (*sw) {
      SweepSpec spec;
      spec.parameter = parse_sweep_param(sweep_param);
      spec.values = parse_values(sweep_values, "--values");
      spec.options = sweep_flags.resolve(sw);
      spec.workers = spec.options.workers;
      spec.options.workers = 1;
      spec.base = load_valid_instance(sweep_inst);
      sweep_robust.apply(spec.base);
      spec.validate();
      const SweepReport rep = sweep(spec);
      if (!sweep_csv.empty()) write_text_file(sweep_csv, sweep_to_csv(rep));
      if (!sweep_chart.empty()) write_text_file(sweep_chart, sweep_chart_svg(rep));
      if (!sweep_timing.empty()) write_text_file(sweep_timing, sweep_timing_csv(rep));
      std::cout << sweep_to_csv(rep);
      bool all = true;
      print_checks(check_trends(rep), all);
      return all ? 0 : kExitTrend;
    }

    if (*cr) {
      const auto caps = parse_values(cr_caps, "--caps");
      SolveOptions opt = cr_flags.resolve(cr);
      const std::size_t workers = opt.workers;
      opt.workers = 1;
      ProblemInstance inst = load_valid_instance(cr_inst);
      cr_robust.apply(inst);
      const RegimeComparison cmp = compare_regimes(inst, caps, cr_rate, opt, workers);
      if (!cr_csv.empty()) write_text_file(cr_csv, regimes_to_csv(cmp));
      if (!cr_chart.empty()) write_text_file(cr_chart, regimes_chart_svg(cmp));
      std::cout << regimes_to_csv(cmp);
      if (cmp.vanishing_cap) {
        std::cout << "gap vanishes from cap_scale " << *cmp.vanishing_cap << "\n";
      } else {
        std::cout << "gap does not vanish over the requested caps\n";
      }
      bool all = true;
      print_checks(check_regimes(cmp), all);
      return all ? 0 : kExitTrend;
    }

    if (*ex) {
      const SolveOptions opt = ex_flags.resolve(ex);
      ObjectiveMode mode;
      if (ex_mode == "cost") mode = ObjectiveMode::cost_robust;
      else if (ex_mode == "emission") mode = ObjectiveMode::emission_robust;
      else if (ex_mode == "quality") mode = ObjectiveMode::quality;
      else if (ex_mode == "combined") mode = ObjectiveMode::combined;
      else throw UsageError("--mode must be cost, emission, quality or combined");
      ReferenceOptima ref;
      if (mode == ObjectiveMode::combined) {
        if (ex_report.empty())
          throw UsageError("mode combined needs z1*, z2*, z3*: run `solve` first and pass its report with --report");
        const auto j = nlohmann::json::parse(read_text_file(ex_report));
        ref = {j.at("z1_star").get<double>(), j.at("z2_star").get<double>(), j.at("z3_star").get<double>()};
      }
      ProblemInstance inst = load_valid_instance(ex_inst);
      ex_robust.apply(inst);
      const BuiltModel built = build_full_model(inst, mode, opt.model, ref);
      const MpsExport mps = export_mps(built.model, "GSS");
      write_text_file(ex_out, mps.mps);
      write_text_file(ex_out + ".names", mps.name_map);
      std::cout << "wrote " << ex_out << " (" << built.model.variables().size() << " columns, "
                << built.model.constraints().size() << " rows, " << built.model.num_binaries() << " binaries)\n";
      return 0;
    }
  } catch (const ProcedureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.status());
  } catch (const NormalizationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormulationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
