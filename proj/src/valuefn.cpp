#include "restop/valuefn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "restop/errors.hpp"

namespace restop {

LogGrid::LogGrid(double zmin, double zmax, int n) {
  if (!(std::isfinite(zmin) && std::isfinite(zmax) && zmin > 0.0 &&
        zmax > zmin))
    throw DomainError("grid needs 0 < zmin < zmax");
  if (n < 4) throw DomainError("grid needs at least 4 nodes");
  n_ = n;
  logmin_ = std::log(zmin);
  dlog_ = (std::log(zmax) - logmin_) / (n - 1);
  z_.resize(n);
  for (int i = 0; i < n; ++i) z_[i] = std::exp(logmin_ + i * dlog_);
  z_.front() = zmin;
  z_.back() = zmax;
}

std::shared_ptr<const LogGrid> LogGrid::make(double zmin, double zmax, int n) {
  return std::make_shared<const LogGrid>(zmin, zmax, n);
}

int LogGrid::cell(double z) const {
  const int i = static_cast<int>(std::floor((std::log(z) - logmin_) / dlog_));
  return std::clamp(i, 0, n_ - 2);
}

bool LogGrid::matches(const LogGrid& other) const {
  return n_ == other.n_ && z_.front() == other.z_.front() &&
         z_.back() == other.z_.back();
}

namespace {

// Fritsch-Carlson derivative choices: interpolant is monotone on every
// monotone data stretch and exact on affine data.
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  std::vector<double> h(n - 1), delta(n - 1), d(n);
  for (int i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  for (int i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] == 0.0 || delta[i] == 0.0 ||
        (delta[i - 1] < 0.0) != (delta[i] < 0.0)) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  // Shape-preserving one-sided endpoint formula.
  auto endpoint = [](double h0, double h1, double d0, double d1) {
    double d_end = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d_end == 0.0 || (d_end < 0.0) != (d0 < 0.0)) {
      d_end = 0.0;
    } else if ((d0 < 0.0) != (d1 < 0.0) && std::abs(d_end) > 3.0 * std::abs(d0)) {
      d_end = 3.0 * d0;
    }
    if (d0 == 0.0) d_end = 0.0;
    return d_end;
  };
  d[0] = endpoint(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

}  // namespace

ValueFunction::ValueFunction(std::shared_ptr<const LogGrid> grid,
                             std::vector<double> values, double tail_c0,
                             double tail_c1)
    : grid_(std::move(grid)), values_(std::move(values)), tail_c0_(tail_c0),
      tail_c1_(tail_c1) {
  if (static_cast<int>(values_.size()) != grid_->size())
    throw GridMismatch("value vector size does not match grid");
  for (const double v : values_)
    if (!std::isfinite(v) || v < 0.0)
      throw DomainError("value function entries must be finite and >= 0");
  if (!std::isfinite(tail_c0_) || !std::isfinite(tail_c1_) || tail_c1_ < 0.0)
    throw DomainError("tail coefficients must be finite with c1 >= 0");
  slopes_ = pchip_slopes(grid_->nodes(), values_);
}

ValueFunction ValueFunction::constant(std::shared_ptr<const LogGrid> grid,
                                      double c) {
  std::vector<double> v(grid->size(), c);
  return ValueFunction(std::move(grid), std::move(v), c, 0.0);
}

ValueFunction ValueFunction::affine(std::shared_ptr<const LogGrid> grid,
                                    double c0, double c1) {
  std::vector<double> v(grid->size());
  for (int i = 0; i < grid->size(); ++i) v[i] = c0 + c1 * grid->z(i);
  return ValueFunction(std::move(grid), std::move(v), c0, c1);
}

double ValueFunction::eval(double z) const {
  if (!(z > 0.0) || !std::isfinite(z))
    throw DomainError("value function eval needs z > 0");
  if (z <= grid_->zmin()) return values_.front();
  if (z > grid_->zmax()) return tail_c0_ + tail_c1_ * z;
  const int i = grid_->cell(z);
  const double x0 = grid_->z(i), x1 = grid_->z(i + 1);
  const double h = x1 - x0;
  const double t = (z - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * values_[i] + h10 * h * slopes_[i] + h01 * values_[i + 1] +
         h11 * h * slopes_[i + 1];
}

double ValueFunction::derivative(double z) const {
  if (!(z > 0.0) || !std::isfinite(z))
    throw DomainError("value function derivative needs z > 0");
  if (z <= grid_->zmin()) return 0.0;
  if (z > grid_->zmax()) return tail_c1_;
  const int i = grid_->cell(z);
  const double x0 = grid_->z(i), x1 = grid_->z(i + 1);
  const double h = x1 - x0;
  const double t = (z - x0) / h;
  const double t2 = t * t;
  const double dh00 = (6.0 * t2 - 6.0 * t) / h;
  const double dh10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double dh01 = (-6.0 * t2 + 6.0 * t) / h;
  const double dh11 = 3.0 * t2 - 2.0 * t;
  return dh00 * values_[i] + dh10 * slopes_[i] + dh01 * values_[i + 1] +
         dh11 * slopes_[i + 1];
}

double weighted_distance(const ValueFunction& f, const ValueFunction& g) {
  if (!f.grid().matches(g.grid()))
    throw GridMismatch("weighted_distance needs matching grids");
  double d = 0.0;
  for (int i = 0; i < f.grid().size(); ++i) {
    const double e =
        std::abs(f.value_at(i) - g.value_at(i)) / (1.0 + f.grid().z(i));
    d = std::max(d, e);
  }
  return d;
}

}  // namespace restop
