#pragma once

#include <optional>
#include <vector>

#include "restop/model.hpp"
#include "restop/valuefn.hpp"

namespace restop {

// Discounted-delay averaging operator
//   (Pi g)(z) = int e^{-disc t} E_z[ p (1 + Z_t) + (1-p) g(Z_t) ] F(dt)
// with Z geometric Brownian motion (z_drift, beta_sq). The time integral
// uses the delay law's quadrature, the space expectation Gauss-Hermite.
class PiTransform {
 public:
  explicit PiTransform(const Model& model, int hermite_n = 64);

  double apply_pi(const ValueFunction& g, double z) const;

  // d/dz (Pi g)(z); the affine part contributes p * e^{z_drift t} exactly.
  double apply_pi_derivative(const ValueFunction& g, double z) const;

  // Inner-problem payoff G(z) = max{gamma, (Pi g)(z)} and its venue.
  double payoff(const ValueFunction& g, double z) const;
  enum class Venue { Lit, Dark };
  Venue payoff_region(const ValueFunction& g, double z) const;  // tie -> Lit

  // Unique crossing Pi g = gamma on the grid range: nullopt when
  // Pi g(zmin) > gamma (dark preferred everywhere, z0 = 0); throws
  // NoBracket when Pi g(zmax) < gamma.
  std::optional<double> crossing_z0(const ValueFunction& g) const;

  // (Pi g)(z_i) for every grid node, optionally OpenMP-parallel.
  std::vector<double> pi_on_grid(const ValueFunction& g,
                                 bool parallel = true) const;
  // Same, restricted to node indices [begin, end).
  std::vector<double> pi_on_range(const ValueFunction& g, int begin, int end,
                                  bool parallel = true) const;

  // Exact image of an affine tail: c -> p*m + (1-p)*m*c componentwise.
  std::pair<double, double> tail_image(double c0, double c1) const;

  const Model& model() const { return *model_; }
  int hermite_n() const { return static_cast<int>(hermite_x_.size()); }

 private:
  double integrate(const ValueFunction& g, double z, bool derivative) const;

  const Model* model_;
  std::vector<double> hermite_x_, hermite_w_;
  // Per delay node: time, F-weight, discounted weights
  // df = fw * e^{-disc t} and df1 = fw * e^{(z_drift - disc) t},
  // log-shift m(t), spread s(t).
  struct DelayNode {
    double t, fw, df, df1, m, s;
  };
  std::vector<DelayNode> delay_nodes_;
  double atom0_ = 0.0;
};

}  // namespace restop
