#include <doctest.h>

#include <cmath>
#include <numeric>

#include "restop/errors.hpp"
#include "restop/quadrature.hpp"

using restop::GaussRule;

namespace {

double integrate(const GaussRule& rule, double (*f)(double)) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * f(rule.x[i]);
  return acc;
}

double monomial_deg(const GaussRule& rule, int k) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i)
    acc += rule.w[i] * std::pow(rule.x[i], k);
  return acc;
}

}  // namespace

TEST_CASE("legendre rule integrates polynomials exactly up to degree 2n-1") {
  const GaussRule rule = restop::gauss_legendre(16);
  REQUIRE(rule.x.size() == 16);
  for (int k = 0; k <= 31; ++k) {
    const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
    CHECK(monomial_deg(rule, k) == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
  }
  // Degree 2n breaks exactness: the rule must not be magically better.
  const GaussRule tiny = restop::gauss_legendre(2);
  CHECK(std::abs(monomial_deg(tiny, 4) - 2.0 / 5.0) > 1e-3);
}

TEST_CASE("legendre rule handles analytic integrands") {
  const GaussRule rule = restop::gauss_legendre(24);
  const double got = integrate(rule, [](double x) { return std::exp(x); });
  CHECK(got == doctest::Approx(std::exp(1.0) - std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("legendre nodes are symmetric with positive weights") {
  const GaussRule rule = restop::gauss_legendre(15);
  const int n = static_cast<int>(rule.x.size());
  for (int i = 0; i < n; ++i) {
    CHECK(rule.w[i] > 0.0);
    CHECK(rule.x[i] == doctest::Approx(-rule.x[n - 1 - i]).epsilon(1e-14).scale(1.0));
  }
  const double mass = std::accumulate(rule.w.begin(), rule.w.end(), 0.0);
  CHECK(mass == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("laguerre rule reproduces factorial moments") {
  const GaussRule rule = restop::gauss_laguerre(20);
  double fact = 1.0;
  for (int k = 0; k <= 12; ++k) {
    if (k > 0) fact *= k;
    CHECK(monomial_deg(rule, k) == doctest::Approx(fact).epsilon(1e-12));
  }
  const double mass = std::accumulate(rule.w.begin(), rule.w.end(), 0.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("laguerre rule integrates damped oscillation") {
  // int_0^inf e^{-x} cos(x) dx = 1/2.
  const GaussRule rule = restop::gauss_laguerre(48);
  const double got = integrate(rule, [](double x) { return std::cos(x); });
  CHECK(got == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("hermite rule reproduces gaussian moments") {
  const GaussRule rule = restop::gauss_hermite(20);
  const double sqrt_pi = std::sqrt(std::acos(-1.0));
  // int e^{-x^2} x^{2k} dx = sqrt(pi) (2k-1)!! / 2^k.
  double dfact = 1.0;
  for (int k = 0; k <= 9; ++k) {
    if (k > 0) dfact *= (2 * k - 1);
    const double exact = sqrt_pi * dfact / std::pow(2.0, k);
    CHECK(monomial_deg(rule, 2 * k) == doctest::Approx(exact).epsilon(1e-12));
    // Odd moments cancel by symmetry up to accumulation noise from the
    // large high-order node magnitudes.
    CHECK(monomial_deg(rule, 2 * k + 1) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  }
}

TEST_CASE("hermite rule integrates exponential tilt exactly in the limit") {
  // int e^{-x^2} e^{a x} dx = sqrt(pi) e^{a^2/4}; entire integrand, so the
  // rule converges geometrically and 32 points are far beyond double precision.
  const GaussRule rule = restop::gauss_hermite(32);
  const double sqrt_pi = std::sqrt(std::acos(-1.0));
  for (double a : {0.3, 1.0, 2.5}) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i)
      acc += rule.w[i] * std::exp(a * rule.x[i]);
    CHECK(acc == doctest::Approx(sqrt_pi * std::exp(a * a / 4.0)).epsilon(1e-13));
  }
}

TEST_CASE("hermite nodes are symmetric and weights positive") {
  const GaussRule rule = restop::gauss_hermite(33);
  const int n = static_cast<int>(rule.x.size());
  for (int i = 0; i < n; ++i) {
    CHECK(rule.w[i] > 0.0);
    CHECK(rule.x[i] == doctest::Approx(-rule.x[n - 1 - i]).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("single-point rules hit the weight-function mean") {
  const GaussRule h = restop::gauss_hermite(1);
  REQUIRE(h.x.size() == 1);
  CHECK(h.x[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(h.w[0] == doctest::Approx(std::sqrt(std::acos(-1.0))).epsilon(1e-14));

  const GaussRule l = restop::gauss_laguerre(1);
  REQUIRE(l.x.size() == 1);
  CHECK(l.x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l.w[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("invalid rule sizes are rejected") {
  CHECK_THROWS_AS(restop::gauss_legendre(0), restop::DomainError);
  CHECK_THROWS_AS(restop::gauss_hermite(-3), restop::DomainError);
}
