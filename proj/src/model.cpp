#include "restop/model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "restop/errors.hpp"
#include "restop/quadrature.hpp"

namespace restop {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

constexpr int kLaguerreNodes = 64;
constexpr int kLegendreNodes = 32;

}  // namespace

DelayLaw DelayLaw::dirac_at_zero() {
  DelayLaw d;
  d.kind_ = DelayKind::DiracAtZero;
  d.atom0_ = 1.0;
  return d;
}

DelayLaw DelayLaw::dirac(double t0) {
  require(std::isfinite(t0) && t0 > 0.0, "dirac delay needs t0 > 0");
  DelayLaw d;
  d.kind_ = DelayKind::Dirac;
  d.t0_ = t0;
  d.nodes_ = {t0};
  d.weights_ = {1.0};
  return d;
}

DelayLaw DelayLaw::exponential(double lambda) {
  require(std::isfinite(lambda) && lambda > 0.0,
          "exponential delay needs lambda > 0");
  DelayLaw d;
  d.kind_ = DelayKind::Exponential;
  d.lambda_ = lambda;
  const GaussRule rule = gauss_laguerre(kLaguerreNodes);
  d.nodes_.reserve(rule.x.size());
  for (const double x : rule.x) d.nodes_.push_back(x / lambda);
  d.weights_ = rule.w;  // substitution t = x/lambda leaves weights unchanged
  return d;
}

DelayLaw DelayLaw::capped_exponential(double lambda, double t0) {
  require(std::isfinite(lambda) && lambda > 0.0,
          "capped exponential delay needs lambda > 0");
  require(std::isfinite(t0) && t0 > 0.0,
          "capped exponential delay needs t0 > 0");
  DelayLaw d;
  d.kind_ = DelayKind::CappedExponential;
  d.lambda_ = lambda;
  d.t0_ = t0;
  // Density lambda e^{-lambda t} on (0, t0), atom e^{-lambda t0} at t0.
  const GaussRule rule = gauss_legendre(kLegendreNodes);
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double t = 0.5 * t0 * (rule.x[i] + 1.0);
    d.nodes_.push_back(t);
    d.weights_.push_back(0.5 * t0 * rule.w[i] * lambda * std::exp(-lambda * t));
  }
  d.nodes_.push_back(t0);
  d.weights_.push_back(std::exp(-lambda * t0));
  return d;
}

DelayLaw DelayLaw::mixture_with_atom(double w0, const DelayLaw& positive_part) {
  require(std::isfinite(w0) && w0 > 0.0 && w0 < 1.0,
          "mixture delay needs w0 in (0,1)");
  require(positive_part.kind() != DelayKind::DiracAtZero &&
              positive_part.kind() != DelayKind::MixtureWithAtom,
          "mixture inner law must be a positive-delay kind");
  DelayLaw d;
  d.kind_ = DelayKind::MixtureWithAtom;
  d.w0_ = w0;
  d.atom0_ = w0;
  d.inner_ = std::make_shared<DelayLaw>(positive_part);
  d.nodes_ = positive_part.nodes_;
  d.weights_.reserve(positive_part.weights_.size());
  for (const double w : positive_part.weights_)
    d.weights_.push_back((1.0 - w0) * w);
  return d;
}

double DelayLaw::discounted_moment(double rho) const {
  require(std::isfinite(rho) && rho >= 0.0,
          "discounted_moment needs rho >= 0");
  double m = atom0_;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    m += weights_[i] * std::exp(-rho * nodes_[i]);
  return m;
}

double DelayLaw::sample(double u) const {
  require(u >= 0.0 && u < 1.0, "delay sample needs u in [0,1)");
  switch (kind_) {
    case DelayKind::DiracAtZero:
      return 0.0;
    case DelayKind::Dirac:
      return t0_;
    case DelayKind::Exponential:
      return -std::log1p(-u) / lambda_;
    case DelayKind::CappedExponential:
      return std::min(-std::log1p(-u) / lambda_, t0_);
    case DelayKind::MixtureWithAtom:
      if (u < w0_) return 0.0;
      return inner_->sample((u - w0_) / (1.0 - w0_));
  }
  throw DomainError("unreachable delay kind");
}

std::pair<double, double> char_roots(double beta_sq, double z_drift,
                                     double disc) {
  require(std::isfinite(beta_sq) && beta_sq > 0.0, "char_roots needs beta_sq > 0");
  require(std::isfinite(z_drift), "char_roots needs finite z_drift");
  require(std::isfinite(disc) && disc > 0.0, "char_roots needs disc > 0");
  // (beta_sq/2) q^2 + (z_drift - beta_sq/2) q - disc = 0
  const double a = 0.5 * beta_sq;
  const double b = z_drift - 0.5 * beta_sq;
  const double c = -disc;
  const double d = b * b - 4.0 * a * c;  // > 0 since disc > 0
  const double sq = std::sqrt(d);
  const double qbig = (b >= 0.0) ? (-b - sq) / (2.0 * a) : (-b + sq) / (2.0 * a);
  const double qother = c / (a * qbig);  // Vieta, avoids cancellation
  const double q1 = std::max(qbig, qother);
  const double q2 = std::min(qbig, qother);
  return {q1, q2};
}

Model::Model(const ModelParams& params, const DelayLaw& delay)
    : params_(params), delay_(delay) {
  const auto& pr = params_;
  require(std::isfinite(pr.mu1) && std::isfinite(pr.mu2), "mu1, mu2 must be finite");
  require(std::isfinite(pr.sigma1) && pr.sigma1 > 0.0, "sigma1 must be > 0");
  require(std::isfinite(pr.sigma2) && pr.sigma2 > 0.0, "sigma2 must be > 0");
  require(std::isfinite(pr.nu) && pr.nu >= -1.0 && pr.nu <= 1.0,
          "nu must lie in [-1,1]");
  require(std::isfinite(pr.r) && pr.r > 0.0, "r must be > 0");
  require(std::isfinite(pr.p) && pr.p > 0.0 && pr.p < 1.0,
          "p must lie in (0,1)");
  require(std::isfinite(pr.gamma) && pr.gamma > 0.0 && pr.gamma <= 1.0,
          "gamma must lie in (0,1]");

  const bool standard = pr.r > pr.mu1 + 0.5 * pr.sigma1 * pr.sigma1 &&
                        pr.r > pr.mu2 + 0.5 * pr.sigma2 * pr.sigma2;
  const bool degenerate = pr.r == pr.mu1 && pr.mu2 < pr.r;
  if (standard) {
    regime_ = Regime::Standard;
  } else if (degenerate) {
    regime_ = Regime::REqualsMu1;
  } else {
    throw RegimeViolation(
        "parameters satisfy neither r > mu_i + sigma_i^2/2 (i=1,2) nor "
        "(r == mu1 and mu2 < r)");
  }

  auto& c = consts_;
  c.beta1 = pr.sigma2 * pr.nu - pr.sigma1;
  c.beta2 = pr.sigma2 * std::sqrt(std::max(0.0, 1.0 - pr.nu * pr.nu));
  c.beta_sq = c.beta1 * c.beta1 + c.beta2 * c.beta2;
  require(c.beta_sq > 0.0, "degenerate ratio volatility: beta_sq must be > 0");
  c.z_drift = pr.mu2 - pr.mu1;
  c.disc = pr.r - pr.mu1;
  if (regime_ == Regime::Standard) {
    std::tie(c.q1, c.q2) = char_roots(c.beta_sq, c.z_drift, c.disc);
  } else {
    // disc = 0: roots of (beta_sq/2) q(q-1) + z_drift q = 0.
    c.q2 = 0.0;
    c.q1 = 1.0 - 2.0 * c.z_drift / c.beta_sq;
  }

  m0_ = delay_.discounted_moment(pr.r - pr.mu1);
  m1_ = delay_.discounted_moment(pr.r - pr.mu2);
}

std::pair<double, double> Model::tail_coefficients() const {
  const double p = params_.p;
  const double c0 = p * m0_ / (1.0 - (1.0 - p) * m0_);
  const double c1 = p * m1_ / (1.0 - (1.0 - p) * m1_);
  return {c0, c1};
}

namespace {

using nlohmann::json;

double get_number(const json& j, const std::string& key,
                  const std::string& where) {
  if (!j.contains(key))
    throw DomainError(where + ": missing required key '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number())
    throw DomainError(where + ": key '" + key + "' must be a number");
  return v.get<double>();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& item : j.items())
    if (allowed.find(item.key()) == allowed.end())
      throw DomainError(where + ": unknown key '" + item.key() + "'");
}

DelayLaw delay_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("delay: must be an object");
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw DomainError("delay: missing string key 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dirac_at_zero") {
    reject_unknown(j, {"kind"}, "delay");
    return DelayLaw::dirac_at_zero();
  }
  if (kind == "dirac") {
    reject_unknown(j, {"kind", "t0"}, "delay");
    return DelayLaw::dirac(get_number(j, "t0", "delay"));
  }
  if (kind == "exponential") {
    reject_unknown(j, {"kind", "lambda"}, "delay");
    return DelayLaw::exponential(get_number(j, "lambda", "delay"));
  }
  if (kind == "capped_exponential") {
    reject_unknown(j, {"kind", "lambda", "t0"}, "delay");
    return DelayLaw::capped_exponential(get_number(j, "lambda", "delay"),
                                        get_number(j, "t0", "delay"));
  }
  if (kind == "mixture_with_atom") {
    reject_unknown(j, {"kind", "w0", "inner"}, "delay");
    if (!j.contains("inner"))
      throw DomainError("delay: mixture_with_atom needs an 'inner' object");
    return DelayLaw::mixture_with_atom(get_number(j, "w0", "delay"),
                                       delay_from_json(j.at("inner")));
  }
  throw DomainError("delay: unknown kind '" + kind + "'");
}

Model model_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("model: top level must be an object");
  reject_unknown(j,
                 {"mu1", "mu2", "sigma1", "sigma2", "nu", "r", "p", "gamma",
                  "delay"},
                 "model");
  ModelParams p;
  p.mu1 = get_number(j, "mu1", "model");
  p.mu2 = get_number(j, "mu2", "model");
  p.sigma1 = get_number(j, "sigma1", "model");
  p.sigma2 = get_number(j, "sigma2", "model");
  p.nu = get_number(j, "nu", "model");
  p.r = get_number(j, "r", "model");
  p.p = get_number(j, "p", "model");
  p.gamma = get_number(j, "gamma", "model");
  if (!j.contains("delay"))
    throw DomainError("model: missing required key 'delay'");
  return Model(p, delay_from_json(j.at("delay")));
}

}  // namespace

Model load_model_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("model JSON parse error: ") + e.what());
  }
  return model_from_json(j);
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model_text(ss.str());
}

}  // namespace restop
