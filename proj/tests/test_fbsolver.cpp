#include <doctest.h>

#include <cmath>

#include "restop/errors.hpp"
#include "restop/fbsolver.hpp"
#include "restop/operators.hpp"
#include "helpers.hpp"

using restop::BoundaryCandidate;
using restop::Model;
using restop::Obstacle;
using restop::ValueFunction;

TEST_CASE("coefficients from the lower boundary satisfy both pin conditions") {
  const Model m = testutil::reference_model();
  for (double a : {0.05, 0.089856343412348341, 0.5, 1.0, 3.0}) {
    const BoundaryCandidate c = restop::coefficients_from_a(m, a);
    CHECK(c.a == a);
    CHECK(restop::basis_value(m, c, a) == doctest::Approx(m.lit()).epsilon(1e-12));
    CHECK(std::abs(restop::basis_slope(m, c, a)) <= 1e-12 / a);
  }
}

TEST_CASE("coefficients at a = 1 freeze to root ratios") {
  // With a = 1 and lit = 1: C1 = -q2/(q1-q2), C2 = q1/(q1-q2).
  const Model m = testutil::reference_model();
  const BoundaryCandidate c = restop::coefficients_from_a(m, 1.0);
  CHECK(c.C1 == doctest::Approx(0.22522126045725811).epsilon(1e-14));
  CHECK(c.C2 == doctest::Approx(0.77477873954274189).epsilon(1e-14));
  CHECK(c.C1 + c.C2 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("basis curvature at the lower boundary matches the ode") {
  // At a the ODE with w(a) = lit, w'(a) = 0 forces
  // w''(a) = 2 disc lit / (beta_sq a^2).
  const Model m = testutil::reference_model();
  const auto& cc = m.consts();
  for (double a : {0.3, 1.0, 2.0}) {
    const BoundaryCandidate c = restop::coefficients_from_a(m, a);
    const double w2 = c.C1 * cc.q1 * (cc.q1 - 1.0) * std::pow(a, cc.q1 - 2.0) +
                      c.C2 * cc.q2 * (cc.q2 - 1.0) * std::pow(a, cc.q2 - 2.0);
    const double expect = 2.0 * cc.disc * m.lit() / (cc.beta_sq * a * a);
    CHECK(w2 == doctest::Approx(expect).epsilon(1e-12));
  }
  const BoundaryCandidate c1 = restop::coefficients_from_a(m, 1.0);
  const double w2_at_1 =
      c1.C1 * cc.q1 * (cc.q1 - 1.0) + c1.C2 * cc.q2 * (cc.q2 - 1.0);
  CHECK(w2_at_1 == doctest::Approx(0.76923076923076923).epsilon(1e-13));
}

TEST_CASE("basis slope matches a difference quotient") {
  const Model m = testutil::reference_model();
  const BoundaryCandidate c = restop::coefficients_from_a(m, 0.09);
  for (double z : {0.0905, 0.095, 0.097}) {
    const double h = 1e-7;
    const double fd =
        (restop::basis_value(m, c, z + h) - restop::basis_value(m, c, z - h)) /
        (2.0 * h);
    CHECK(restop::basis_slope(m, c, z) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("free-boundary solve against an affine obstacle") {
  // The one-shot comparator obstacle A(z) = a0 + a1 z is the cleanest
  // closed-form target; golden boundaries frozen from a converged run.
  const Model m = testutil::reference_model();
  const double p = m.params().p;
  const double a0 = m.m0() * (p + (1.0 - p) * m.lit());
  const double a1 = p * m.m1();
  const Obstacle affine{[&](double z) { return a0 + a1 * z; },
                        [&](double) { return a1; }};
  const double z0 = (m.lit() - a0) / a1;
  CHECK(z0 == doctest::Approx(0.10357275892238312).epsilon(1e-13));

  const BoundaryCandidate c =
      restop::solve_boundaries(m, affine, z0, 1e-4, 1e3);
  CHECK(c.a == doctest::Approx(0.10036880944216078).epsilon(1e-9));
  CHECK(c.b == doctest::Approx(0.10690141162870481).epsilon(1e-9));
  CHECK(c.a < z0);
  CHECK(z0 < c.b);

  const auto [rv, rs] = restop::residuals_at_b(m, affine, c, c.b);
  CHECK(std::abs(rv) <= 1e-8 * (1.0 + c.b));
  CHECK(std::abs(rs) * c.b <= 1e-8 * (1.0 + c.b));

  // Value matching really is tangential: the basis stays above the
  // obstacle on (a, b) and meets it at b.
  for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double z = c.a + frac * (c.b - c.a);
    CHECK(restop::basis_value(m, c, z) >= affine.value(z) - 1e-10);
    CHECK(restop::basis_value(m, c, z) >= m.lit() - 1e-10);
  }
}

TEST_CASE("hint restarts converge to the same boundaries") {
  const Model m = testutil::reference_model();
  const double p = m.params().p;
  const double a0 = m.m0() * (p + (1.0 - p) * m.lit());
  const double a1 = p * m.m1();
  const Obstacle affine{[&](double z) { return a0 + a1 * z; },
                        [&](double) { return a1; }};
  const double z0 = (m.lit() - a0) / a1;
  const BoundaryCandidate first =
      restop::solve_boundaries(m, affine, z0, 1e-4, 1e3);
  const BoundaryCandidate again =
      restop::solve_boundaries(m, affine, z0, 1e-4, 1e3, &first);
  CHECK(again.a == doctest::Approx(first.a).epsilon(1e-10));
  CHECK(again.b == doctest::Approx(first.b).epsilon(1e-10));
}

TEST_CASE("gamma-tilde application reproduces the first iterate") {
  // Seeding with the constant lit payoff: the obstacle is Pi(gamma),
  // whose closed form is the comparator's affine A. The candidate must
  // therefore match the affine-obstacle solve above.
  const Model m = testutil::reference_model();
  const restop::PiTransform pi(m);
  const auto grid = restop::LogGrid::make(1e-4, 1e3, 2000);
  const ValueFunction g0 = ValueFunction::constant(grid, m.lit());
  const auto [g1, cand] = restop::apply_gamma_tilde(pi, g0);
  CHECK(cand.a == doctest::Approx(0.10036880944216078).epsilon(1e-9));
  CHECK(cand.b == doctest::Approx(0.10690141162870481).epsilon(1e-9));
  // The new iterate dominates the lit payoff and is monotone.
  for (int i = 0; i < grid->size(); ++i) {
    CHECK(g1.value_at(i) >= m.lit() - 1e-12);
    if (i > 0) CHECK(g1.value_at(i) >= g1.value_at(i - 1) - 1e-12);
  }
  // Below a the iterate sticks to the lit payoff.
  CHECK(g1.eval(cand.a * 0.5) == doctest::Approx(m.lit()).epsilon(1e-12));
}

TEST_CASE("gamma-tilde rejects iterates with no lit region") {
  const Model m = testutil::reference_model();
  const restop::PiTransform pi(m);
  const auto grid = restop::LogGrid::make(1e-4, 1e3, 400);
  const ValueFunction huge = ValueFunction::constant(grid, 50.0);
  CHECK_THROWS_AS(restop::apply_gamma_tilde(pi, huge),
                  restop::StructureViolation);
}
