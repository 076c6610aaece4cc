#include "restop/operators.hpp"

#include <cmath>

#include "restop/errors.hpp"
#include "restop/quadrature.hpp"

namespace restop {

namespace {
constexpr double kInvSqrtPi = 0.5641895835477562869;  // 1/sqrt(pi)
}

PiTransform::PiTransform(const Model& model, int hermite_n) : model_(&model) {
  if (hermite_n < 4) throw DomainError("PiTransform needs hermite_n >= 4");
  GaussRule gh = gauss_hermite(hermite_n);
  hermite_x_ = std::move(gh.x);
  hermite_w_ = std::move(gh.w);

  const auto& c = model.consts();
  atom0_ = model.delay().atom_at_zero();
  const auto& nodes = model.delay().nodes();
  const auto& weights = model.delay().weights();
  delay_nodes_.reserve(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    DelayNode dn;
    dn.t = nodes[k];
    dn.fw = weights[k];
    dn.df = weights[k] * std::exp(-c.disc * dn.t);
    // Affine part e^{-disc t} E[Z^1_t] = e^{(z_drift - disc) t}, kept as a
    // single exponent so long delays cannot overflow.
    dn.df1 = weights[k] * std::exp((c.z_drift - c.disc) * dn.t);
    dn.m = (c.z_drift - 0.5 * c.beta_sq) * dn.t;
    dn.s = std::sqrt(c.beta_sq * dn.t);
    delay_nodes_.push_back(dn);
  }
}

double PiTransform::integrate(const ValueFunction& g, double z,
                              bool derivative) const {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("Pi needs z > 0");
  const double p = model_->params().p;
  const double logz = std::log(z);

  double total = 0.0;
  if (atom0_ > 0.0) {
    // t = 0: no discount, no diffusion.
    const double inner = derivative
                             ? p + (1.0 - p) * g.derivative(z)
                             : p * (1.0 + z) + (1.0 - p) * g.eval(z);
    total += atom0_ * inner;
  }
  for (const DelayNode& dn : delay_nodes_) {
    if (dn.df <= 0.0 && dn.df1 <= 0.0) continue;
    const double root2s = std::sqrt(2.0) * dn.s;
    double acc = 0.0;
    for (std::size_t j = 0; j < hermite_x_.size(); ++j) {
      // Z_t = z * zeta with log zeta = m + sqrt(2) s x_j.
      const double logzeta = dn.m + root2s * hermite_x_[j];
      const double zt = std::exp(std::min(logz + logzeta, 700.0));
      if (derivative) {
        acc += hermite_w_[j] * g.derivative(zt) * std::exp(logzeta);
      } else {
        acc += hermite_w_[j] * g.eval(zt);
      }
    }
    acc *= kInvSqrtPi;
    if (derivative) {
      total += p * dn.df1 + (1.0 - p) * dn.df * acc;
    } else {
      total += p * (dn.df + z * dn.df1) + (1.0 - p) * dn.df * acc;
    }
  }
  return total;
}

double PiTransform::apply_pi(const ValueFunction& g, double z) const {
  return integrate(g, z, false);
}

double PiTransform::apply_pi_derivative(const ValueFunction& g,
                                        double z) const {
  return integrate(g, z, true);
}

double PiTransform::payoff(const ValueFunction& g, double z) const {
  return std::max(model_->lit(), apply_pi(g, z));
}

PiTransform::Venue PiTransform::payoff_region(const ValueFunction& g,
                                              double z) const {
  return apply_pi(g, z) > model_->lit() ? Venue::Dark : Venue::Lit;
}

std::optional<double> PiTransform::crossing_z0(const ValueFunction& g) const {
  const double lit = model_->lit();
  const LogGrid& grid = g.grid();
  double lo = grid.zmin(), hi = grid.zmax();
  const double flo = apply_pi(g, lo) - lit;
  if (flo > 0.0) return std::nullopt;
  const double fhi = apply_pi(g, hi) - lit;
  if (fhi < 0.0)
    throw NoBracket("Pi g stays below the lit payoff on the whole grid");
  // Bisect in log z; Pi g - lit is increasing through the crossing.
  double llo = std::log(lo), lhi = std::log(hi);
  for (int it = 0; it < 200; ++it) {
    const double lmid = 0.5 * (llo + lhi);
    const double zmid = std::exp(lmid);
    if (apply_pi(g, zmid) - lit < 0.0) {
      llo = lmid;
    } else {
      lhi = lmid;
    }
    if (lhi - llo < 1e-10 * std::max(1.0, std::abs(lhi))) break;
  }
  return std::exp(0.5 * (llo + lhi));
}

std::vector<double> PiTransform::pi_on_grid(const ValueFunction& g,
                                            bool parallel) const {
  return pi_on_range(g, 0, g.grid().size(), parallel);
}

std::vector<double> PiTransform::pi_on_range(const ValueFunction& g, int begin,
                                             int end, bool parallel) const {
  if (begin < 0 || end > g.grid().size() || begin > end)
    throw DomainError("pi_on_range: bad index range");
  std::vector<double> out(end - begin);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int i = begin; i < end; ++i)
      out[i - begin] = apply_pi(g, g.grid().z(i));
  } else {
    for (int i = begin; i < end; ++i)
      out[i - begin] = apply_pi(g, g.grid().z(i));
  }
  return out;
}

std::pair<double, double> PiTransform::tail_image(double c0, double c1) const {
  const double p = model_->params().p;
  const double m0 = model_->m0();
  const double m1 = model_->m1();
  return {p * m0 + (1.0 - p) * m0 * c0, p * m1 + (1.0 - p) * m1 * c1};
}

}  // namespace restop
