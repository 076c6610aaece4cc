#pragma once

#include <vector>

namespace restop {

// Nodes and weights of an n-point Gauss rule. Weights include the full
// weight-function mass: sum(w) = 2 for Legendre, 1 for Laguerre,
// sqrt(pi) for Hermite.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Weight 1 on (-1, 1). Exact for polynomials up to degree 2n-1.
GaussRule gauss_legendre(int n);

// Weight e^{-x} on (0, inf).
GaussRule gauss_laguerre(int n);

// Weight e^{-x^2} on (-inf, inf).
GaussRule gauss_hermite(int n);

}  // namespace restop
