#pragma once

#include <functional>
#include <utility>

#include "restop/model.hpp"
#include "restop/operators.hpp"
#include "restop/valuefn.hpp"

namespace restop {

// Continuation-region ODE solution w(z) = C1 z^q1 + C2 z^q2 on (a, b),
// pinned by value and smooth fit at the lower boundary a.
struct BoundaryCandidate {
  double a = 0.0;
  double b = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
};

// Upper-boundary conditions: the continuation value must meet this
// function with matching slope at b. For the recursive problem it is
// (Pi g, (Pi g)'); the comparator passes its closed-form obstacle.
struct Obstacle {
  std::function<double(double)> value;
  std::function<double(double)> slope;
};

// C1, C2 from w(a) = lit payoff, w'(a) = 0:
//   C1 = -lit q2 / ((q1-q2) a^q1), C2 = lit q1 / ((q1-q2) a^q2).
BoundaryCandidate coefficients_from_a(const Model& model, double a);

double basis_value(const Model& model, const BoundaryCandidate& cand, double z);
double basis_slope(const Model& model, const BoundaryCandidate& cand, double z);

// (w(b) - B(b), w'(b) - B'(b)) for the candidate's coefficients.
std::pair<double, double> residuals_at_b(const Model& model,
                                         const Obstacle& obstacle,
                                         const BoundaryCandidate& cand,
                                         double b);

// Solves the four-condition free-boundary system for 0 < a < z0 < b.
// Damped Newton from (z0/2, 2 z0) (or the hint), nested-bisection
// fallback; final residuals must satisfy |w(b)-B(b)| <= 1e-8 (1+b) and
// |w'(b)-B'(b)| * b <= 1e-8 (1+b). Throws NoConvergence otherwise.
BoundaryCandidate solve_boundaries(const Model& model, const Obstacle& obstacle,
                                   double z0, double zmin, double zmax,
                                   const BoundaryCandidate* hint = nullptr);

// One application of the recursive-stopping operator: from iterate g,
// locate z0, solve the free-boundary system against Pi g, and assemble
// the next iterate (lit payoff below a, w inside, Pi g above b, affine
// tail image beyond the grid). Verifies dominance over the payoff.
std::pair<ValueFunction, BoundaryCandidate> apply_gamma_tilde(
    const PiTransform& pi, const ValueFunction& g,
    const BoundaryCandidate* hint = nullptr);

}  // namespace restop
