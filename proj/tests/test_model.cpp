#include <doctest.h>

#include <cmath>

#include "restop/errors.hpp"
#include "restop/model.hpp"
#include "helpers.hpp"

using restop::DelayLaw;
using restop::Model;
using restop::ModelParams;
using testutil::reference_params;

TEST_CASE("reference model derived constants") {
  const Model m = testutil::reference_model();
  const auto& c = m.consts();
  CHECK(c.beta1 == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(c.beta2 == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(c.beta_sq == doctest::Approx(0.13).epsilon(1e-15));
  CHECK(c.z_drift == doctest::Approx(-0.01).epsilon(1e-15));
  CHECK(c.disc == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(c.q1 == doctest::Approx(1.6267187741504754).epsilon(1e-15));
  CHECK(c.q2 == doctest::Approx(-0.47287262030432153).epsilon(1e-15));
  CHECK(m.regime() == restop::Regime::Standard);
  CHECK(m.lit() == 1.0);
}

TEST_CASE("characteristic roots satisfy the quadratic and vieta") {
  // Independent check: plug the roots back into the characteristic
  // polynomial and compare the product/sum with Vieta's formulas.
  for (auto [bs, zd, disc] : {std::tuple{0.13, -0.01, 0.05},
                              std::tuple{0.08, -0.01, 0.05},
                              std::tuple{0.02, 0.004, 0.011},
                              std::tuple{1.7, -0.3, 0.25}}) {
    const auto [q1, q2] = restop::char_roots(bs, zd, disc);
    CHECK(q1 > 1.0);
    CHECK(q2 < 0.0);
    auto poly = [&](double q) { return 0.5 * bs * q * (q - 1.0) + zd * q - disc; };
    CHECK(std::abs(poly(q1)) < 1e-12 * (1.0 + std::abs(q1)));
    CHECK(std::abs(poly(q2)) < 1e-12);
    CHECK(q1 * q2 == doctest::Approx(-disc / (0.5 * bs)).epsilon(1e-13));
    CHECK(q1 + q2 == doctest::Approx(1.0 - zd / (0.5 * bs)).epsilon(1e-13));
  }
}

TEST_CASE("roots for the lower-volatility variant") {
  const auto [q1, q2] = restop::char_roots(0.08, -0.01, 0.05);
  CHECK(q1 == doctest::Approx(1.9058688457449498).epsilon(1e-14));
  CHECK(q2 == doctest::Approx(-0.6558688457449498).epsilon(1e-14));
  // Power-basis spot values used elsewhere as frozen constants.
  const Model ref = testutil::reference_model();
  CHECK(std::pow(2.0, -ref.consts().q1) ==
        doctest::Approx(0.32382386684099333).epsilon(1e-14));
  CHECK(std::pow(2.0, ref.consts().q2) ==
        doctest::Approx(0.72052848914376506).epsilon(1e-14));
}

TEST_CASE("alternate regime r == mu1") {
  const Model m = testutil::alternate_regime_model();
  CHECK(m.regime() == restop::Regime::REqualsMu1);
  const auto& c = m.consts();
  CHECK(c.disc == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  // Roots degenerate to q2 = 0 and q1 = 1 - 2 z_drift / beta_sq.
  CHECK(c.q2 == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(c.q1 == doctest::Approx(1.9230769230769231).epsilon(1e-14));
  // disc = 0 makes m0 = 1 exactly.
  CHECK(m.m0() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("regime gaps are rejected") {
  // r strictly between mu1 and the standard-regime floor is unsupported.
  ModelParams p = reference_params();
  p.r = 0.005;  // below mu1 = 0.01
  CHECK_THROWS_AS(Model(p, DelayLaw::dirac(1.0)), restop::RegimeViolation);
  p.r = 0.01;  // equals mu1 but mu2 = 0 needs mu2 < r: ok
  CHECK_NOTHROW(Model(p, DelayLaw::dirac(1.0)));
  p.r = 0.01;
  p.mu2 = 0.01;  // mu2 == r breaks the explicit-solution case
  CHECK_THROWS_AS(Model(p, DelayLaw::dirac(1.0)), restop::RegimeViolation);
}

TEST_CASE("parameter validation") {
  auto bad = [](auto&& tweak) {
    ModelParams p = reference_params();
    tweak(p);
    return p;
  };
  const DelayLaw law = DelayLaw::dirac(1.0);
  CHECK_THROWS_AS(Model(bad([](ModelParams& p) { p.sigma1 = 0.0; }), law),
                  restop::DomainError);
  CHECK_THROWS_AS(Model(bad([](ModelParams& p) { p.sigma2 = -0.1; }), law),
                  restop::DomainError);
  CHECK_THROWS_AS(Model(bad([](ModelParams& p) { p.nu = 1.5; }), law),
                  restop::DomainError);
  CHECK_THROWS_AS(Model(bad([](ModelParams& p) { p.p = 0.0; }), law),
                  restop::DomainError);
  CHECK_THROWS_AS(Model(bad([](ModelParams& p) { p.p = 1.0; }), law),
                  restop::DomainError);
  CHECK_THROWS_AS(Model(bad([](ModelParams& p) { p.gamma = 0.0; }), law),
                  restop::DomainError);
  CHECK_THROWS_AS(Model(bad([](ModelParams& p) { p.gamma = 1.01; }), law),
                  restop::DomainError);
  // nu = +-1 is legal (perfectly correlated drivers).
  CHECK_NOTHROW(Model(bad([](ModelParams& p) { p.nu = 1.0; }), law));
  CHECK_NOTHROW(Model(bad([](ModelParams& p) { p.nu = -1.0; }), law));
}

TEST_CASE("perfect correlation can null the z volatility") {
  // sigma1 == sigma2, nu = 1 gives beta_sq = 0: degenerate dynamics.
  ModelParams p = reference_params();
  p.sigma2 = 0.2;
  p.nu = 1.0;
  CHECK_THROWS_AS(Model(p, DelayLaw::dirac(1.0)), restop::DomainError);
}

TEST_CASE("discounted delay moments: dirac and exponential") {
  const DelayLaw d = DelayLaw::dirac(1.0);
  CHECK(d.discounted_moment(0.05) == doctest::Approx(std::exp(-0.05)).epsilon(1e-15));
  CHECK(d.discounted_moment(0.0) == doctest::Approx(1.0).epsilon(1e-15));

  const DelayLaw e = DelayLaw::exponential(2.0);
  // int e^{-rho t} lambda e^{-lambda t} dt = lambda / (lambda + rho).
  CHECK(e.discounted_moment(0.05) ==
        doctest::Approx(0.97560975609756098).epsilon(1e-13));
  CHECK(e.discounted_moment(0.06) == doctest::Approx(2.0 / 2.06).epsilon(1e-13));

  CHECK_THROWS_AS(d.discounted_moment(-0.01), restop::DomainError);
}

TEST_CASE("discounted delay moments: capped exponential and mixture") {
  const DelayLaw c = DelayLaw::capped_exponential(2.0, 1.0);
  // Truncated exponential with the residual mass as an atom at the cap:
  // lambda/(lambda+rho) (1 - e^{-(lambda+rho) t0}) + e^{-(lambda+rho) t0}.
  auto capped_exact = [](double lambda, double t0, double rho) {
    const double s = lambda + rho;
    return lambda / s * (1.0 - std::exp(-s * t0)) + std::exp(-s * t0);
  };
  CHECK(c.discounted_moment(0.05) ==
        doctest::Approx(capped_exact(2.0, 1.0, 0.05)).epsilon(1e-13));
  CHECK(c.discounted_moment(0.05) ==
        doctest::Approx(0.97874963179482449).epsilon(1e-13));

  const DelayLaw m = DelayLaw::mixture_with_atom(0.25, DelayLaw::exponential(2.0));
  CHECK(m.atom_at_zero() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.discounted_moment(0.05) ==
        doctest::Approx(0.25 + 0.75 * 0.97560975609756098).epsilon(1e-13));

  const DelayLaw z = DelayLaw::dirac_at_zero();
  CHECK(z.discounted_moment(0.73) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("delay law validation") {
  CHECK_THROWS_AS(DelayLaw::dirac(0.0), restop::DomainError);
  CHECK_THROWS_AS(DelayLaw::dirac(-1.0), restop::DomainError);
  CHECK_THROWS_AS(DelayLaw::exponential(0.0), restop::DomainError);
  CHECK_THROWS_AS(DelayLaw::capped_exponential(2.0, 0.0), restop::DomainError);
  CHECK_THROWS_AS(DelayLaw::capped_exponential(0.0, 1.0), restop::DomainError);
  CHECK_THROWS_AS(
      DelayLaw::mixture_with_atom(1.5, DelayLaw::exponential(1.0)),
      restop::DomainError);
  CHECK_THROWS_AS(
      DelayLaw::mixture_with_atom(0.5, DelayLaw::dirac_at_zero()),
      restop::DomainError);
  // w0 = 0 and w0 = 1 collapse to existing kinds and are rejected to keep
  // one canonical spelling per law.
  CHECK_THROWS_AS(
      DelayLaw::mixture_with_atom(0.0, DelayLaw::exponential(1.0)),
      restop::DomainError);
}

TEST_CASE("delay sampling follows the inverse cdf") {
  const DelayLaw d = DelayLaw::dirac(0.7);
  CHECK(d.sample(0.0) == 0.7);
  CHECK(d.sample(0.9999) == 0.7);

  const DelayLaw e = DelayLaw::exponential(2.0);
  CHECK(e.sample(0.5) == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-14));
  CHECK(e.sample(0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));

  const DelayLaw c = DelayLaw::capped_exponential(2.0, 0.2);
  // Below the cap the conditional law matches the exponential; above it
  // every draw lands on the cap.
  const double u_at_cap = 1.0 - std::exp(-2.0 * 0.2);
  CHECK(c.sample(u_at_cap * 0.5) ==
        doctest::Approx(e.sample(u_at_cap * 0.5)).epsilon(1e-14));
  CHECK(c.sample(u_at_cap + 0.5 * (1.0 - u_at_cap)) == doctest::Approx(0.2));
  CHECK(c.sample(0.999999) == doctest::Approx(0.2));

  const DelayLaw m = DelayLaw::mixture_with_atom(0.25, e);
  CHECK(m.sample(0.1) == 0.0);
  CHECK(m.sample(0.24999) == 0.0);
  // Beyond the atom, the remaining mass re-scales onto the inner law.
  CHECK(m.sample(0.25 + 0.75 * 0.5) ==
        doctest::Approx(e.sample(0.5)).epsilon(1e-14));

  const DelayLaw z = DelayLaw::dirac_at_zero();
  CHECK(z.sample(0.3) == 0.0);
}

TEST_CASE("affine tail coefficients of the fixed point") {
  const Model m = testutil::reference_model();
  CHECK(m.m0() == doctest::Approx(0.95122942450071402).epsilon(1e-15));
  CHECK(m.m1() == doctest::Approx(0.94176453358424872).epsilon(1e-15));
  const auto [c0, c1] = m.tail_coefficients();
  // c = p m / (1 - (1-p) m) with p = 1/2.
  CHECK(c0 == doctest::Approx(0.9069947677049046).epsilon(1e-14));
  CHECK(c1 == doctest::Approx(0.88993854720633188).epsilon(1e-14));
  // The tail slope must stay below 1: the dark payoff cannot outgrow s+k.
  CHECK(c1 < 1.0);
  CHECK(c0 < 1.0);
}

TEST_CASE("model json round trip and strictness") {
  const char* text = R"({
    "mu1": 0.01, "mu2": 0.0, "sigma1": 0.2, "sigma2": 0.3, "nu": 0.0,
    "r": 0.06, "p": 0.5, "gamma": 1.0,
    "delay": {"kind": "dirac", "t0": 1.0}
  })";
  const Model m = restop::load_model_text(text);
  CHECK(m.consts().q1 == doctest::Approx(1.6267187741504754).epsilon(1e-15));
  CHECK(m.delay().kind() == restop::DelayKind::Dirac);

  CHECK_THROWS_AS(restop::load_model_text("{not json"), restop::DomainError);
  CHECK_THROWS_AS(restop::load_model_text("[1,2]"), restop::DomainError);
  // Unknown top-level key.
  CHECK_THROWS_AS(restop::load_model_text(R"({
    "mu1": 0.01, "mu2": 0.0, "sigma1": 0.2, "sigma2": 0.3, "nu": 0.0,
    "r": 0.06, "p": 0.5, "gamma": 1.0, "extra": 1,
    "delay": {"kind": "dirac", "t0": 1.0}
  })"),
                  restop::DomainError);
  // Missing required key.
  CHECK_THROWS_AS(restop::load_model_text(R"({
    "mu1": 0.01, "mu2": 0.0, "sigma1": 0.2, "sigma2": 0.3, "nu": 0.0,
    "r": 0.06, "p": 0.5,
    "delay": {"kind": "dirac", "t0": 1.0}
  })"),
                  restop::DomainError);
  // Non-numeric value.
  CHECK_THROWS_AS(restop::load_model_text(R"({
    "mu1": "a", "mu2": 0.0, "sigma1": 0.2, "sigma2": 0.3, "nu": 0.0,
    "r": 0.06, "p": 0.5, "gamma": 1.0,
    "delay": {"kind": "dirac", "t0": 1.0}
  })"),
                  restop::DomainError);
  // Unknown delay kind and misspelled delay parameter.
  CHECK_THROWS_AS(restop::load_model_text(R"({
    "mu1": 0.01, "mu2": 0.0, "sigma1": 0.2, "sigma2": 0.3, "nu": 0.0,
    "r": 0.06, "p": 0.5, "gamma": 1.0,
    "delay": {"kind": "weibull", "t0": 1.0}
  })"),
                  restop::DomainError);
  CHECK_THROWS_AS(restop::load_model_text(R"({
    "mu1": 0.01, "mu2": 0.0, "sigma1": 0.2, "sigma2": 0.3, "nu": 0.0,
    "r": 0.06, "p": 0.5, "gamma": 1.0,
    "delay": {"kind": "dirac", "tee0": 1.0}
  })"),
                  restop::DomainError);
}

TEST_CASE("all delay kinds load from json") {
  auto with_delay = [](const std::string& delay) {
    return std::string(R"({"mu1": 0.01, "mu2": 0.0, "sigma1": 0.2,
      "sigma2": 0.3, "nu": 0.0, "r": 0.06, "p": 0.5, "gamma": 1.0,
      "delay": )") +
           delay + "}";
  };
  CHECK(restop::load_model_text(with_delay(R"({"kind": "dirac_at_zero"})"))
            .delay()
            .kind() == restop::DelayKind::DiracAtZero);
  CHECK(restop::load_model_text(with_delay(R"({"kind": "exponential", "lambda": 2.0})"))
            .delay()
            .kind() == restop::DelayKind::Exponential);
  CHECK(restop::load_model_text(
            with_delay(R"({"kind": "capped_exponential", "lambda": 2.0, "t0": 1.0})"))
            .delay()
            .kind() == restop::DelayKind::CappedExponential);
  const Model mix = restop::load_model_text(with_delay(
      R"({"kind": "mixture_with_atom", "w0": 0.25,
          "inner": {"kind": "exponential", "lambda": 2.0}})"));
  CHECK(mix.delay().kind() == restop::DelayKind::MixtureWithAtom);
  CHECK(mix.delay().inner() != nullptr);
  CHECK(mix.delay().inner()->kind() == restop::DelayKind::Exponential);
}
