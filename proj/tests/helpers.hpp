#pragma once

#include <cmath>

#include "restop/model.hpp"

namespace testutil {

inline restop::ModelParams reference_params() {
  restop::ModelParams p;
  p.mu1 = 0.01;
  p.mu2 = 0.0;
  p.sigma1 = 0.2;
  p.sigma2 = 0.3;
  p.nu = 0.0;
  p.r = 0.06;
  p.p = 0.5;
  p.gamma = 1.0;
  return p;
}

// Reference model: beta_sq = 0.13, z_drift = -0.01, disc = 0.05.
inline restop::Model reference_model(
    const restop::DelayLaw& law = restop::DelayLaw::dirac(1.0)) {
  return restop::Model(reference_params(), law);
}

// r == mu1 exactly with mu2 < r: closed-form regime.
inline restop::Model alternate_regime_model() {
  restop::ModelParams p = reference_params();
  p.mu1 = 0.06;
  return restop::Model(p, restop::DelayLaw::dirac(1.0));
}

inline bool close_rel(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace testutil
