#pragma once

#include <memory>
#include <vector>

namespace restop {

// Log-uniform grid on [zmin, zmax]: z_i = zmin * exp(i * dlog).
class LogGrid {
 public:
  LogGrid(double zmin, double zmax, int n);
  static std::shared_ptr<const LogGrid> make(double zmin, double zmax, int n);

  int size() const { return n_; }
  double z(int i) const { return z_[i]; }
  const std::vector<double>& nodes() const { return z_; }
  double zmin() const { return z_.front(); }
  double zmax() const { return z_.back(); }
  double dlog() const { return dlog_; }

  // Cell index i with z in [z_i, z_{i+1}), clamped to [0, size()-2].
  int cell(double z) const;

  bool matches(const LogGrid& other) const;

 private:
  int n_;
  double logmin_, dlog_;
  std::vector<double> z_;
};

// Grid-sampled candidate value function with monotone cubic (PCHIP)
// interpolation inside the grid, a flat extension below zmin, and an
// affine tail c0 + c1*z strictly above zmax (the node at zmax itself
// evaluates to its stored value). Immutable after construction.
class ValueFunction {
 public:
  ValueFunction(std::shared_ptr<const LogGrid> grid,
                std::vector<double> values, double tail_c0, double tail_c1);

  static ValueFunction constant(std::shared_ptr<const LogGrid> grid, double c);
  static ValueFunction affine(std::shared_ptr<const LogGrid> grid, double c0,
                              double c1);

  // Interpolated value at z > 0; throws DomainError for z <= 0.
  double eval(double z) const;

  // One-sided/interpolated derivative; 0 below the grid, tail_c1 above.
  double derivative(double z) const;

  double value_at(int i) const { return values_[i]; }
  double slope_at(int i) const { return slopes_[i]; }
  const std::vector<double>& values() const { return values_; }
  double tail_c0() const { return tail_c0_; }
  double tail_c1() const { return tail_c1_; }

  const LogGrid& grid() const { return *grid_; }
  const std::shared_ptr<const LogGrid>& grid_ptr() const { return grid_; }

 private:
  std::shared_ptr<const LogGrid> grid_;
  std::vector<double> values_;
  std::vector<double> slopes_;  // PCHIP endpoint derivatives per node
  double tail_c0_, tail_c1_;
};

// sup_i |f(z_i) - g(z_i)| / (1 + z_i); throws GridMismatch.
double weighted_distance(const ValueFunction& f, const ValueFunction& g);

}  // namespace restop
