#pragma once

#include <cstdint>
#include <vector>

#include "restop/fbsolver.hpp"
#include "restop/model.hpp"
#include "restop/operators.hpp"
#include "restop/valuefn.hpp"

namespace restop {

struct SolverOptions {
  double zmin = 1e-4;
  double zmax = 1e3;
  int grid_n = 2000;
  double fp_tol = 1e-9;
  int max_iter = 200;
  int hermite_n = 64;
  bool parallel = true;
};

// Converged solution of u = Gamma~ u. Evaluation is piecewise analytic:
// the lit payoff on (0, a*], the continuation basis on (a*, b*), and the
// dark payoff Pi u (quadrature against the stored grid function, affine
// beyond the grid) on [b*, inf). Closed-form
// regimes (delay atom 1 at zero, or r == mu1) have empty lit/continuation
// regions and a globally affine u.
struct SolveResult {
  SolveResult(Model m, SolverOptions o, ValueFunction uu)
      : model(std::move(m)), options(o), u(std::move(uu)) {}

  Model model;
  SolverOptions options;
  ValueFunction u;
  double a_star = 0.0;
  double b_star = 0.0;
  double z0 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;  // weighted distance per iteration
  // (a, b) accepted at each iteration; the upper boundary's trajectory is
  // not monotone in general, so it is exposed rather than summarized.
  std::vector<std::pair<double, double>> boundary_history;
  bool closed_form = false;

  double eval(double z) const;
  double eval_prime(double z) const;
};

// Iterates g_{k+1} = Gamma~ g_k from g_0 == gamma until the weighted
// distance falls below fp_tol. Throws MaxIterations past options.max_iter
// and StructureViolation when the model admits no lit region.
SolveResult solve(const Model& model, const SolverOptions& options = {});

// Behavior of the solution near z = 0: u should approach the lit payoff
// and Pi u should sit below it (selling lit is optimal for tiny premium).
struct ZeroLimitReport {
  double u_at_zmin = 0.0;
  double pi_at_zmin = 0.0;
  double lit = 0.0;
  bool lit_optimal_near_zero = false;
};
ZeroLimitReport u_at_zero_check(const SolveResult& result);

// Empirical contraction check: random admissible pairs (monotone, convex,
// equal to the lit payoff at zmin), one Gamma~ application each, largest
// ratio of weighted distances. The provable bound is (1-p) * max(m0, m1).
struct ContractionReport {
  int trials = 0;
  int skipped = 0;  // pairs with indistinguishable inputs
  double max_ratio = 0.0;
  double bound = 0.0;
};
ContractionReport contraction_certificate(const Model& model, int trials,
                                          std::uint64_t seed,
                                          const SolverOptions& options = {});

}  // namespace restop
