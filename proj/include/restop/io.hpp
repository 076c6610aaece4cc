#pragma once

#include <string>
#include <vector>

#include "restop/comparator.hpp"
#include "restop/fixedpoint.hpp"
#include "restop/montecarlo.hpp"
#include "restop/oracle.hpp"
#include "restop/strategy.hpp"

namespace restop {

inline constexpr const char* kVersionString = "restop 1.0.0";

// Same schema as the model files the loaders accept; round-trips through
// load_model_text.
std::string model_to_json_text(const Model& model);
std::string options_to_json_text(const SolverOptions& options);
SolverOptions options_from_json_text(const std::string& text);

// Complete solve output: version, config echo (model + options),
// boundaries, basis coefficients, convergence history, and the
// per-iteration boundary pairs.
std::string solve_result_to_json_text(const SolveResult& result);

// The part of a solve output a later command needs. Throws DomainError
// when the text is not a solve output.
struct SolveSummary {
  Model model;
  SolverOptions options;
  double a_star = 0.0;
  double b_star = 0.0;
  double z0 = 0.0;
  bool closed_form = false;
};
SolveSummary solve_summary_from_json_text(const std::string& text);

// Discretized-control cross-check output: reference boundaries, the step
// ladder with extrapolation, tolerances, and the verdict.
std::string oracle_json_text(const SolveSummary& reference,
                             const BermudanConfig& config,
                             const RichardsonResult& sweep, double tol_a,
                             double tol_b, bool a_ok, bool b_ok);

// Simulation output with the analytic value it is benchmarked against.
// When a one-off run shares the recursive run's random numbers, its
// report and the paired payoff-difference estimate ride along.
struct CrnDiff {
  double mean = 0.0;
  double stderr_ = 0.0;
};
std::string sim_report_json_text(const Model& model,
                                 const SolverOptions& options,
                                 const TradingRule& rule,
                                 const PathConfig& path_config,
                                 bool oneoff_style, const SimReport& report,
                                 double value_benchmark, double diff_sigmas,
                                 const SimReport* oneoff_report = nullptr,
                                 const CrnDiff* crn = nullptr);

// One-shot comparator output with the ordering gaps.
std::string comparator_json_text(const SolveResult& recursive,
                                 const ComparatorResult& oneoff,
                                 const OrderingReport& ordering);

// CSV bodies. Callers prepend csv_config_header for file outputs.
std::string u_csv(const SolveResult& result);
std::string compare_csv(const SolveResult& recursive,
                        const ComparatorResult& oneoff);
std::string events_csv(const std::vector<PathEvent>& events);

// "# restop 1.0.0" + "# config: {...}" comment lines.
std::string csv_config_header(const std::string& config_json_text);

}  // namespace restop
