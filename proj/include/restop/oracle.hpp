#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "restop/model.hpp"
#include "restop/operators.hpp"
#include "restop/valuefn.hpp"

namespace restop {

// Discrete-time dynamic-programming reference solver ("Bermudan"):
// observation times k*dt on the log-z grid, one-step transitions by the
// exact GBM law. Used as the independent brute-force check on the
// analytic free-boundary machinery.
struct BermudanConfig {
  double dt = 1e-3;
  int hermite_n = 64;
  // Outer loop: payoff refresh G = max{lit, Pi w} until the refresh moves
  // G by at most refresh_tol in the weighted norm (full oracle only).
  double refresh_tol = 1e-9;
  int max_refresh = 400;
  // Inner loop. Policy iteration solves the exercise-set-restricted
  // linear system per round; value iteration sweeps
  // w <- max{G, df*P w} and refreshes the payoff every
  // pi_refresh_every sweeps (the policy solver refreshes per round).
  bool use_policy_iteration = true;
  int pi_refresh_every = 5;
  double sweep_tol = 1e-10;  // weighted residual sup|w - max(G, df*Pw)|
  long max_sweeps = 400000;
  bool parallel = true;
};

struct BermudanResult {
  ValueFunction w;
  int a_idx = -1;      // last exercise node below the continuation range
  int b_idx = -1;      // first exercise node above it
  double a_est = 0.0;  // sub-cell boundary estimates (log-linear root of
  double b_est = 0.0;  //   continuation-minus-payoff between nodes)
  long sweeps = 0;
  int refreshes = 0;
  double residual = 0.0;
};

// frozen_payoff_source: evaluate the payoff with a fixed inner value
// function (non-recursive problem, comparator-style). nullptr = full
// oracle, payoff refreshed from the iterate itself.
BermudanResult bermudan_solve(const Model& model,
                              std::shared_ptr<const LogGrid> grid,
                              const ValueFunction* frozen_payoff_source,
                              const BermudanConfig& config);

// dt ladder {4dt, 2dt, dt} coarse-to-fine with warm starts; Richardson
// extrapolation using the empirically measured convergence order
// (clamped to [0.4, 2.2]; boundary error is generically O(sqrt(dt))
// through the smooth-fit degeneracy, so the order is estimated, not
// assumed).
struct RichardsonResult {
  std::vector<double> dts;
  std::vector<double> a_raw, b_raw;
  double a = 0.0, b = 0.0;
  double order_a = 0.0, order_b = 0.0;
};
RichardsonResult boundary_sweep(const Model& model,
                                std::shared_ptr<const LogGrid> grid,
                                double dt_finest,
                                const BermudanConfig& base);

// Monte Carlo check of the hitting-time Laplace transform against the
// closed form (z/barrier)^{q1} (barrier above z) or ^{q2} (below).
// Brownian-bridge crossing detection removes the discrete-monitoring
// bias; crossing times stamp at the interval end.
struct HittingReport {
  double z = 0.0, barrier = 0.0;
  double estimate = 0.0, stderr_val = 0.0, closed_form = 0.0;
  long n_paths = 0;
};
HittingReport hitting_time_check(const Model& model, double z, double barrier,
                                 long n_paths, std::uint64_t seed,
                                 double dt = 1e-2, double t_max = 0.0);

}  // namespace restop
