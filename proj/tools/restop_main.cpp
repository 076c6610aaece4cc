#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "restop/comparator.hpp"
#include "restop/errors.hpp"
#include "restop/fixedpoint.hpp"
#include "restop/io.hpp"
#include "restop/montecarlo.hpp"
#include "restop/oracle.hpp"
#include "restop/strategy.hpp"

namespace {

using namespace restop;
using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Empty path means stdout.
void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write file: " + path);
  out << content;
  if (!out) throw DomainError("write failed: " + path);
}

json config_echo(const Model& model, const SolverOptions& opts) {
  json cfg;
  cfg["model"] = json::parse(model_to_json_text(model));
  cfg["options"] = json::parse(options_to_json_text(opts));
  return cfg;
}

struct SolveArgs {
  std::string model_path, out_path, result_path;
  SolverOptions opts;
};

int cmd_solve(const SolveArgs& a) {
  const Model model = load_model_file(a.model_path);
  const SolveResult res = solve(model, a.opts);
  write_output(a.result_path, solve_result_to_json_text(res));
  if (!a.out_path.empty()) {
    const std::string header =
        csv_config_header(config_echo(model, a.opts).dump());
    write_output(a.out_path, header + u_csv(res));
  }
  return 0;
}

struct OracleArgs {
  std::string result_path, model_path, out_path;
  double dt = 1e-3;
  bool grid_flags_given = false;
  SolverOptions grid_flags;  // only zmin/zmax/grid_n read
};

int cmd_oracle(const OracleArgs& a) {
  const SolveSummary ref = solve_summary_from_json_text(read_file(a.result_path));
  if (!a.model_path.empty()) {
    const Model given = load_model_file(a.model_path);
    if (model_to_json_text(given) != model_to_json_text(ref.model))
      throw DomainError("--model does not match the model in --result");
  }
  if (a.grid_flags_given &&
      (a.grid_flags.grid_n != ref.options.grid_n ||
       a.grid_flags.zmin != ref.options.zmin ||
       a.grid_flags.zmax != ref.options.zmax))
    throw DomainError("grid flags do not match the grid in --result");

  const auto grid = LogGrid::make(ref.options.zmin, ref.options.zmax,
                                  ref.options.grid_n);
  BermudanConfig cfg;
  cfg.dt = a.dt;
  cfg.hermite_n = ref.options.hermite_n;
  cfg.parallel = ref.options.parallel;

  if (ref.closed_form) {
    // No boundaries to sweep; agreement means the discretized control
    // also stops everywhere immediately.
    const BermudanResult br = bermudan_solve(ref.model, grid, nullptr, cfg);
    const bool agree = br.a_idx < 0 && br.b_idx < 0;
    RichardsonResult sweep;
    sweep.dts = {4.0 * a.dt, 2.0 * a.dt, a.dt};
    write_output(a.out_path,
                 oracle_json_text(ref, cfg, sweep, 0.0, 0.0, agree, agree));
    return agree ? 0 : 2;
  }

  const RichardsonResult sweep = boundary_sweep(ref.model, grid, a.dt, cfg);
  const double dlog = grid->dlog();
  const double two_cells = std::exp(2.0 * dlog) - 1.0;
  const double tol_a = std::max(ref.a_star * two_cells, 5e-3 * ref.a_star);
  const double tol_b = std::max(ref.b_star * two_cells, 5e-3 * ref.b_star);
  const bool a_ok = std::abs(sweep.a - ref.a_star) <= tol_a;
  const bool b_ok = std::abs(sweep.b - ref.b_star) <= tol_b;
  write_output(a.out_path,
               oracle_json_text(ref, cfg, sweep, tol_a, tol_b, a_ok, b_ok));
  return (a_ok && b_ok) ? 0 : 2;
}

struct CompareArgs {
  std::string model_path, out_path, result_path;
  SolverOptions opts;
};

std::string wedge_path(const std::string& out_path, const char* suffix) {
  const std::size_t dot = out_path.find_last_of('.');
  const std::string stem =
      dot == std::string::npos ? out_path : out_path.substr(0, dot);
  return stem + suffix + ".csv";
}

int cmd_compare(const CompareArgs& a) {
  const Model model = load_model_file(a.model_path);
  const SolveResult res = solve(model, a.opts);
  const ComparatorResult cmp = solve_comparator(model, a.opts);
  const OrderingReport rep = ordering_report(res, cmp);
  write_output(a.result_path, comparator_json_text(res, cmp, rep));
  if (!a.out_path.empty()) {
    const std::string header =
        csv_config_header(config_echo(model, a.opts).dump());
    write_output(a.out_path, header + compare_csv(res, cmp));
    const TradingRule recursive{res.a_star, res.b_star};
    const TradingRule oneoff{cmp.a_hat, cmp.b_hat};
    write_output(wedge_path(a.out_path, "_wedge_recursive"),
                 header + region_wedge_csv(recursive, 10.0, 201));
    write_output(wedge_path(a.out_path, "_wedge_oneoff"),
                 header + region_wedge_csv(oneoff, 10.0, 201));
  }
  return 0;
}

struct SimulateArgs {
  std::string model_path, out_path;
  SolverOptions opts;
  PathConfig path_cfg;
  bool with_oneoff = false;
};

int cmd_simulate(const SimulateArgs& a) {
  const Model model = load_model_file(a.model_path);
  const SolveResult res = solve(model, a.opts);
  const TradingRule rule{res.a_star, res.b_star};
  const double v = value2d(res, a.path_cfg.s0, a.path_cfg.k0);

  std::vector<double> payoffs;
  const SimReport rep =
      simulate_recursive(model, rule, a.path_cfg, &payoffs);
  double sigmas;
  if (rep.stderr_ > 0.0) {
    sigmas = std::abs(rep.mean - v) / rep.stderr_;
  } else {
    sigmas = std::abs(rep.mean - v) <= 1e-12 * (1.0 + std::abs(v))
                 ? 0.0
                 : std::numeric_limits<double>::infinity();
  }

  SimReport oneoff_rep;
  CrnDiff crn;
  const SimReport* oneoff_ptr = nullptr;
  const CrnDiff* crn_ptr = nullptr;
  if (a.with_oneoff) {
    std::vector<double> payoffs_oneoff;
    oneoff_rep = simulate_oneoff(model, rule, a.path_cfg, &payoffs_oneoff);
    double mean = 0.0;
    for (std::size_t i = 0; i < payoffs.size(); ++i)
      mean += payoffs[i] - payoffs_oneoff[i];
    mean /= static_cast<double>(payoffs.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < payoffs.size(); ++i) {
      const double d = payoffs[i] - payoffs_oneoff[i] - mean;
      ss += d * d;
    }
    crn.mean = mean;
    crn.stderr_ = payoffs.size() > 1
                      ? std::sqrt(ss / static_cast<double>(payoffs.size() - 1)) /
                            std::sqrt(static_cast<double>(payoffs.size()))
                      : 0.0;
    oneoff_ptr = &oneoff_rep;
    crn_ptr = &crn;
  }

  write_output(a.out_path,
               sim_report_json_text(model, a.opts, rule, a.path_cfg, false,
                                    rep, v, sigmas, oneoff_ptr, crn_ptr));
  return sigmas > 4.0 ? 2 : 0;
}

struct RegionsArgs {
  std::string model_path, out_path;
  SolverOptions opts;
  bool overlay = false;
  PathConfig path_cfg;
};

int cmd_regions(const RegionsArgs& a) {
  const Model model = load_model_file(a.model_path);
  const SolveResult res = solve(model, a.opts);
  const TradingRule rule{res.a_star, res.b_star};

  std::vector<std::pair<double, double>> overlay_pts;
  if (a.overlay) overlay_pts = sample_path(model, rule, a.path_cfg);

  json cfg = config_echo(model, a.opts);
  cfg["rule"]["a_star"] = rule.a_star;
  cfg["rule"]["b_star"] = rule.b_star;
  cfg["overlay"] = a.overlay;
  if (a.overlay) {
    cfg["simulation"]["dt"] = a.path_cfg.dt;
    cfg["simulation"]["t_max"] = a.path_cfg.t_max;
    cfg["simulation"]["seed"] = a.path_cfg.master_seed;
    cfg["simulation"]["s0"] = a.path_cfg.s0;
    cfg["simulation"]["k0"] = a.path_cfg.k0;
  }
  const std::string body = region_wedge_csv(
      rule, 10.0, 201, a.overlay ? &overlay_pts : nullptr);
  write_output(a.out_path, csv_config_header(cfg.dump()) + body);
  return 0;
}

void add_grid_flags(CLI::App* cmd, SolverOptions* opts) {
  cmd->add_option("--grid-n", opts->grid_n, "number of grid points");
  cmd->add_option("--zmin", opts->zmin, "left grid edge");
  cmd->add_option("--zmax", opts->zmax, "right grid edge");
  cmd->add_option("--fp-tol", opts->fp_tol, "fixed-point stopping tolerance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recursive optimal stopping for dark-pool order placement"};
  app.set_version_flag("--version", kVersionString);
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve_cmd =
      app.add_subcommand("solve", "solve the recursive stopping problem");
  solve_cmd->add_option("--model", sa.model_path, "model JSON file")
      ->required();
  solve_cmd->add_option("--out", sa.out_path, "value-function CSV path");
  solve_cmd->add_option("--result", sa.result_path,
                        "solve result JSON path (default stdout)");
  add_grid_flags(solve_cmd, &sa.opts);

  OracleArgs oa;
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "cross-check boundaries against the discretized control");
  oracle_cmd->add_option("--result", oa.result_path,
                         "solve result JSON from a prior run")
      ->required();
  oracle_cmd->add_option("--model", oa.model_path,
                         "model JSON file (must match --result)");
  oracle_cmd->add_option("--out", oa.out_path,
                         "comparison JSON path (default stdout)");
  oracle_cmd->add_option("--dt", oa.dt, "finest time step of the sweep");
  add_grid_flags(oracle_cmd, &oa.grid_flags);

  CompareArgs ca;
  auto* compare_cmd = app.add_subcommand(
      "compare", "one-shot comparator, ordering gaps, and premium");
  compare_cmd->add_option("--model", ca.model_path, "model JSON file")
      ->required();
  compare_cmd->add_option("--out", ca.out_path,
                          "premium CSV path (also writes wedge CSVs)");
  compare_cmd->add_option("--result", ca.result_path,
                          "gaps JSON path (default stdout)");
  add_grid_flags(compare_cmd, &ca.opts);

  SimulateArgs ma;
  long sim_seed = 0;
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "execute the solved rule on simulated paths");
  simulate_cmd->add_option("--model", ma.model_path, "model JSON file")
      ->required();
  simulate_cmd->add_option("--out", ma.out_path,
                           "simulation JSON path (default stdout)");
  simulate_cmd->add_option("--paths", ma.path_cfg.n_paths,
                           "number of simulated paths");
  simulate_cmd->add_option("--seed", sim_seed, "master RNG seed")->required();
  simulate_cmd->add_option("--dt", ma.path_cfg.dt, "simulation time step");
  simulate_cmd->add_option("--tmax", ma.path_cfg.t_max,
                           "horizon (0: 100/disc)");
  simulate_cmd->add_option("--s0", ma.path_cfg.s0, "initial parent size");
  simulate_cmd->add_option("--k0", ma.path_cfg.k0, "initial dark size");
  simulate_cmd->add_flag("--with-oneoff", ma.with_oneoff,
                         "also run the one-off style with shared draws");
  add_grid_flags(simulate_cmd, &ma.opts);

  RegionsArgs ra;
  long reg_seed = 0;
  auto* regions_cmd =
      app.add_subcommand("regions", "action-region wedge data for plotting");
  regions_cmd->add_option("--model", ra.model_path, "model JSON file")
      ->required();
  regions_cmd->add_option("--out", ra.out_path,
                          "wedge CSV path (default stdout)");
  auto* overlay_flag = regions_cmd->add_flag(
      "--overlay-path", ra.overlay, "overlay one simulated (s, k) path");
  auto* reg_seed_opt =
      regions_cmd->add_option("--seed", reg_seed, "master RNG seed");
  regions_cmd->add_option("--dt", ra.path_cfg.dt, "overlay time step");
  regions_cmd->add_option("--tmax", ra.path_cfg.t_max, "overlay horizon");
  regions_cmd->add_option("--s0", ra.path_cfg.s0, "overlay start parent size");
  regions_cmd->add_option("--k0", ra.path_cfg.k0, "overlay start dark size");
  reg_seed_opt->needs(overlay_flag);
  add_grid_flags(regions_cmd, &ra.opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 1;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(sa);
    if (oracle_cmd->parsed()) {
      oa.grid_flags_given = oracle_cmd->count("--grid-n") > 0 ||
                            oracle_cmd->count("--zmin") > 0 ||
                            oracle_cmd->count("--zmax") > 0;
      return cmd_oracle(oa);
    }
    if (compare_cmd->parsed()) return cmd_compare(ca);
    if (simulate_cmd->parsed()) {
      ma.path_cfg.master_seed = static_cast<std::uint64_t>(sim_seed);
      return cmd_simulate(ma);
    }
    if (regions_cmd->parsed()) {
      if (ra.overlay && regions_cmd->count("--seed") == 0)
        throw DomainError("--overlay-path requires an explicit --seed");
      ra.path_cfg.master_seed = static_cast<std::uint64_t>(reg_seed);
      if (ra.overlay && ra.path_cfg.t_max <= 0.0)
        ra.path_cfg.t_max = 10.0;  // keep the overlay plottable by default
      return cmd_regions(ra);
    }
  } catch (const NoConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const StructureViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NoBracket& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
