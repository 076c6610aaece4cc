#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace restop {

// Market parameters. s follows GBM(mu1, sigma1); the premium k follows
// GBM(mu2, sigma2) driven by a Brownian motion with correlation nu to
// the first. A lit sale pays gamma*s immediately; a dark order fills
// with probability p after a random delay and pays s+k at the fill time.
struct ModelParams {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double nu = 0.0;
  double r = 0.0;
  double p = 0.0;
  double gamma = 1.0;
};

enum class DelayKind {
  DiracAtZero,        // instantaneous resolution
  Dirac,              // fixed positive delay t0
  Exponential,        // rate lambda
  CappedExponential,  // Exponential(lambda) truncated at t0, atom at t0
  MixtureWithAtom     // atom w0 at zero + (1-w0) * positive-delay law
};

// Law of the dark-order resolution delay. Carries an atom at zero plus a
// quadrature discretization (nodes/weights) of the positive-time part;
// positive atoms (the cap of CappedExponential) are folded into the nodes.
class DelayLaw {
 public:
  static DelayLaw dirac_at_zero();
  static DelayLaw dirac(double t0);
  static DelayLaw exponential(double lambda);
  static DelayLaw capped_exponential(double lambda, double t0);
  static DelayLaw mixture_with_atom(double w0, const DelayLaw& positive_part);

  DelayKind kind() const { return kind_; }
  double atom_at_zero() const { return atom0_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  // int e^{-rho t} F(dt), rho >= 0. Exact for Dirac kinds, quadrature
  // otherwise (relative error < 1e-13 for rho within the solver's range).
  double discounted_moment(double rho) const;

  // Inverse CDF at u in [0, 1): one uniform draw maps to one delay.
  double sample(double u) const;

  // Kind parameters (meaningful per kind; see factories).
  double t0() const { return t0_; }
  double lambda() const { return lambda_; }
  double w0() const { return w0_; }
  const DelayLaw* inner() const { return inner_.get(); }

 private:
  DelayLaw() = default;
  DelayKind kind_ = DelayKind::DiracAtZero;
  double atom0_ = 0.0;
  double t0_ = 0.0, lambda_ = 0.0, w0_ = 0.0;
  std::shared_ptr<const DelayLaw> inner_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Constants of the reduced one-dimensional problem in z = k/s.
struct DerivedConstants {
  double beta1 = 0.0;     // sigma2*nu - sigma1
  double beta2 = 0.0;     // sigma2*sqrt(1-nu^2)
  double beta_sq = 0.0;   // beta1^2 + beta2^2
  double z_drift = 0.0;   // mu2 - mu1
  double disc = 0.0;      // r - mu1, discount rate after reduction
  double q1 = 0.0;        // characteristic roots, q2 < 0 <= q1 is not
  double q2 = 0.0;        //   guaranteed; standard regime has q1>1>0>q2
};

enum class Regime {
  Standard,   // r > mu_i + sigma_i^2/2 for i = 1, 2
  REqualsMu1  // r == mu1 and mu2 < r; disc = 0, explicit solution
};

// Roots of (beta_sq/2) q(q-1) + z_drift q - disc = 0 for disc > 0,
// returned as (q1, q2) with q1 > 1 > 0 > q2. Uses the numerically
// stable form of the quadratic formula.
std::pair<double, double> char_roots(double beta_sq, double z_drift,
                                     double disc);

// Validated model: parameters + delay law + derived constants + regime.
class Model {
 public:
  Model(const ModelParams& params, const DelayLaw& delay);

  const ModelParams& params() const { return params_; }
  const DelayLaw& delay() const { return delay_; }
  const DerivedConstants& consts() const { return consts_; }
  Regime regime() const { return regime_; }

  double lit() const { return params_.gamma; }  // reduced lit payoff
  double m0() const { return m0_; }  // discounted_moment(r - mu1)
  double m1() const { return m1_; }  // discounted_moment(r - mu2)

  // Slope/intercept (c0, c1) of the affine fixed-point tail:
  // c0 = p*m0/(1-(1-p)*m0), c1 = p*m1/(1-(1-p)*m1).
  std::pair<double, double> tail_coefficients() const;

 private:
  ModelParams params_;
  DelayLaw delay_;
  DerivedConstants consts_;
  Regime regime_ = Regime::Standard;
  double m0_ = 0.0, m1_ = 0.0;
};

// JSON model files: object with keys mu1, mu2, sigma1, sigma2, nu, r, p,
// gamma, delay. All required; unknown keys rejected. delay is an object
// {"kind": ..., ...} with kind-specific parameters.
Model load_model_file(const std::string& path);
Model load_model_text(const std::string& json_text);

}  // namespace restop
