#pragma once

#include <cstdint>
#include <vector>

#include "restop/fixedpoint.hpp"
#include "restop/model.hpp"
#include "restop/strategy.hpp"

namespace restop {

struct PathConfig {
  double dt = 1e-3;
  double t_max = 0.0;  // <= 0: defaults to 100 / disc (standard regime)
  long n_paths = 100000;
  std::uint64_t master_seed = 0;
  double s0 = 1.0;
  double k0 = 1.0;
  bool parallel = true;
  bool record_events = false;  // forces a serial path loop
};

enum class EventKind { Lit, DarkTry, DarkFill, DarkFail, Trunc };
const char* event_name(EventKind kind);

struct PathEvent {
  long path = 0;
  double t = 0.0;
  double s = 0.0;
  double k = 0.0;
  EventKind kind = EventKind::Lit;
};

// Aggregates over simulated executions of a trading rule. Every path
// terminates exactly one way: lit_fills + dark_fills + truncations
// == n_paths. dark_failures counts failed attempts (a recursive path can
// contribute several; a one-off failure also terminates as a lit fill).
struct SimReport {
  double mean = 0.0;
  double stderr_ = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long lit_fills = 0;
  long dark_fills = 0;
  long dark_failures = 0;
  long truncations = 0;
  double mean_dark_attempts = 0.0;
  double mean_stop_time = 0.0;
  long n_paths = 0;
  std::vector<PathEvent> events;
};

// Discounted-payoff simulation of the rule under the two-asset dynamics,
// with retries allowed after failed dark attempts.
SimReport simulate_recursive(const Model& model, const TradingRule& rule,
                             const PathConfig& config,
                             std::vector<double>* per_path_payoffs = nullptr);

// Same dynamics, but a failed dark attempt forces an immediate lit sale.
SimReport simulate_oneoff(const Model& model, const TradingRule& rule,
                          const PathConfig& config,
                          std::vector<double>* per_path_payoffs = nullptr);

// One trajectory of (s, k) at every decision point (config.dt steps plus
// dark-delay jumps) until the path terminates, for plot overlays. Uses
// path index 0 of config.master_seed.
std::vector<std::pair<double, double>> sample_path(const Model& model,
                                                   const TradingRule& rule,
                                                   const PathConfig& config);

// Optional-stopping diagnostic on the reduced ratio process: with tau the
// first exit from (a*, b*), E[e^{-disc (tau ^ t)} u(Z)] must equal u(z)
// (martingale on the continuation region), while the value frozen at the
// fixed horizon t is a supermartingale and must not exceed u(z).
struct MartingaleReport {
  double stopped_mean = 0.0;
  double stopped_stderr = 0.0;
  double unstopped_mean = 0.0;
  double unstopped_stderr = 0.0;
  double u_at_z = 0.0;
  long n_paths = 0;
};
MartingaleReport martingale_diagnostic(const SolveResult& result, double z,
                                       double t, long n_paths,
                                       std::uint64_t seed, double dt = 1e-3);

struct KsReport {
  double statistic = 0.0;
  double critical_5pct = 0.0;
  double n_effective = 0.0;
  bool reject = false;
};

// Measure-change check: sample (S_t, K_t) under the physical dynamics,
// weight each draw by S_t e^{-mu1 t} / s0; the reweighted law of
// log(K_t/S_t) must be N(log z0 + (z_drift - beta_sq/2) t, beta_sq t),
// the reduced dynamics the solver uses. One-sample weighted KS test.
KsReport ks_ratio_reweighted(const Model& model, double z0, double t,
                             long n_paths, std::uint64_t seed);

// Control: Z sampled directly from the reduced dynamics against the same
// normal law (validates the KS machinery itself).
KsReport ks_direct_z(const Model& model, double z0, double t, long n_paths,
                     std::uint64_t seed);

// Stepping-code check against exact GBM marginals: means of S_t and K_t
// and the correlation of per-step log increments.
struct MarginalsReport {
  double mean_s = 0.0, se_s = 0.0, exact_s = 0.0;
  double mean_k = 0.0, se_k = 0.0, exact_k = 0.0;
  double corr = 0.0, se_corr = 0.0, exact_corr = 0.0;
  long n_paths = 0;
};
MarginalsReport gbm_marginals_check(const Model& model, double t,
                                    long n_steps, long n_paths,
                                    std::uint64_t seed);

}  // namespace restop
