#pragma once

#include "restop/fixedpoint.hpp"
#include "restop/model.hpp"

namespace restop {

// Discounted value of attempting the dark sale once at ratio z, with a
// forced lit sale on failure when the attempt resolves:
//   A(z) = p (m0 + m1 z) + (1 - p) lit m0.
double payoff_A(const Model& model, double z);
double payoff_A_slope(const Model& model);

// One-shot benchmark: the trader gets a single dark attempt. Its value
// u_hat solves a plain (non-recursive) optimal stopping problem with
// payoff max(lit, A) and is globally analytic: lit on (0, a_hat], the
// continuation basis on (a_hat, b_hat), and A on [b_hat, inf). When
// A(0) >= lit (immediate resolution, r == mu1, or small enough gamma)
// attempting at once is optimal everywhere and u_hat == A.
struct ComparatorResult {
  ComparatorResult(Model m, double pa0, double pa1)
      : model(std::move(m)), a0(pa0), a1(pa1) {}

  Model model;
  double a0 = 0.0;  // A intercept
  double a1 = 0.0;  // A slope
  double a_hat = 0.0;
  double b_hat = 0.0;
  double z0_hat = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  bool closed_form = false;

  double eval(double z) const;
  double eval_prime(double z) const;
};

ComparatorResult solve_comparator(const Model& model,
                                  const SolverOptions& options = {});

// Gaps between the one-shot and recursive solutions. Checks, on the
// recursive solution's grid nodes, that retry optionality helps:
// a_hat >= a_star, z0_hat >= z0, u_hat <= u (within tolerance), and that
// every node where u sticks to the lit payoff also has u_hat stuck.
// b_hat >= b_star is asserted only when disc == 0; in the standard
// regime b_gap is reported without a sign requirement. Violations throw
// OrderingViolation naming the first offending node.
struct OrderingReport {
  double a_gap = 0.0;   // a_hat - a_star
  double b_gap = 0.0;   // b_hat - b_star
  double z0_gap = 0.0;  // z0_hat - z0
  double max_value_gap = 0.0;  // max weighted (u_hat - u), <= 0 up to tol
  int nodes_checked = 0;
  bool b_gap_asserted = false;
};
OrderingReport ordering_report(const SolveResult& recursive,
                               const ComparatorResult& oneoff);

// Dollar value of retry optionality for a parent order of size s and
// dark candidate size k.
double premium(const SolveResult& recursive, const ComparatorResult& oneoff,
               double s, double k);

}  // namespace restop
