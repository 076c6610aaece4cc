#include "restop/fbsolver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "restop/errors.hpp"
#include "restop/log.hpp"

namespace restop {

BoundaryCandidate coefficients_from_a(const Model& model, double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw DomainError("coefficients_from_a needs a > 0");
  const double lit = model.lit();
  const double q1 = model.consts().q1;
  const double q2 = model.consts().q2;
  BoundaryCandidate cand;
  cand.a = a;
  cand.C1 = -lit * q2 / ((q1 - q2) * std::pow(a, q1));
  cand.C2 = lit * q1 / ((q1 - q2) * std::pow(a, q2));
  return cand;
}

double basis_value(const Model& model, const BoundaryCandidate& cand,
                   double z) {
  const double q1 = model.consts().q1;
  const double q2 = model.consts().q2;
  return cand.C1 * std::pow(z, q1) + cand.C2 * std::pow(z, q2);
}

double basis_slope(const Model& model, const BoundaryCandidate& cand,
                   double z) {
  const double q1 = model.consts().q1;
  const double q2 = model.consts().q2;
  return cand.C1 * q1 * std::pow(z, q1 - 1.0) +
         cand.C2 * q2 * std::pow(z, q2 - 1.0);
}

std::pair<double, double> residuals_at_b(const Model& model,
                                         const Obstacle& obstacle,
                                         const BoundaryCandidate& cand,
                                         double b) {
  return {basis_value(model, cand, b) - obstacle.value(b),
          basis_slope(model, cand, b) - obstacle.slope(b)};
}

namespace {

// Obstacle evaluations cached per b: Newton perturbs a with b fixed, and
// the obstacle (a Pi application) is the expensive part.
struct ObstacleCache {
  const Obstacle* obs;
  double b = -1.0, value = 0.0, slope = 0.0;
  void ensure(double bb) {
    if (bb != b) {
      b = bb;
      value = obs->value(bb);
      slope = obs->slope(bb);
    }
  }
};

// Residuals scaled to a common dimensionless size: the value residual by
// 1/(1+b), the slope residual by b/(1+b).
struct Scaled {
  double rv = 0.0, rs = 0.0;
  double norm() const { return std::max(std::abs(rv), std::abs(rs)); }
};

constexpr double kTargetTol = 1e-12;
constexpr double kAcceptTol = 1e-8;

}  // namespace

BoundaryCandidate solve_boundaries(const Model& model, const Obstacle& obstacle,
                                   double z0, double zmin, double zmax,
                                   const BoundaryCandidate* hint) {
  if (!(zmin < z0 && z0 < zmax))
    throw DomainError("solve_boundaries needs zmin < z0 < zmax");

  ObstacleCache cache{&obstacle, -1.0, 0.0, 0.0};
  auto eval = [&](double la, double lb) -> Scaled {
    const BoundaryCandidate c = coefficients_from_a(model, std::exp(la));
    const double b = std::exp(lb);
    cache.ensure(b);
    Scaled s;
    s.rv = (basis_value(model, c, b) - cache.value) / (1.0 + b);
    s.rs = (basis_slope(model, c, b) - cache.slope) * b / (1.0 + b);
    return s;
  };

  const double la_min = std::log(zmin);
  const double la_max = std::log(z0) + std::log1p(-1e-6);
  const double lb_min = std::log(z0) + std::log1p(1e-6);
  const double lb_max = std::log(zmax * 0.99);

  double la = std::log(0.5 * z0), lb = std::log(2.0 * z0);
  if (hint != nullptr && hint->a > 0.0 && hint->b > 0.0) {
    la = std::log(hint->a);
    lb = std::log(hint->b);
  }
  la = std::clamp(la, la_min, la_max);
  lb = std::clamp(lb, lb_min, lb_max);

  Scaled f = eval(la, lb);
  auto run_newton = [&]() {
    for (int it = 0; it < 80; ++it) {
      if (f.norm() <= kTargetTol) return;
      const double dla = 1e-7, dlb = 1e-7;
      const Scaled fa = eval(std::min(la + dla, la_max), lb);
      const Scaled fb = eval(la, std::min(lb + dlb, lb_max));
      const double ha = std::min(la + dla, la_max) - la;
      const double hb = std::min(lb + dlb, lb_max) - lb;
      if (ha == 0.0 || hb == 0.0) return;
      const double j11 = (fa.rv - f.rv) / ha, j12 = (fb.rv - f.rv) / hb;
      const double j21 = (fa.rs - f.rs) / ha, j22 = (fb.rs - f.rs) / hb;
      const double det = j11 * j22 - j12 * j21;
      if (!(std::abs(det) > 1e-30)) return;
      const double sa = (-f.rv * j22 + f.rs * j12) / det;
      const double sb = (-f.rs * j11 + f.rv * j21) / det;
      bool accepted = false;
      double lam = 1.0;
      for (int h = 0; h < 30; ++h, lam *= 0.5) {
        const double na = std::clamp(la + lam * sa, la_min, la_max);
        const double nb = std::clamp(lb + lam * sb, lb_min, lb_max);
        const Scaled fn = eval(na, nb);
        if (fn.norm() < f.norm()) {
          la = na;
          lb = nb;
          f = fn;
          accepted = true;
          break;
        }
      }
      if (!accepted) return;
    }
  };
  run_newton();

  if (f.norm() > kTargetTol) {
    // Nested bisection: the slope residual is matched by the inner loop
    // (in b), the value residual by the outer loop (in a).
    RESTOP_DEBUG("free-boundary Newton stalled at " << f.norm()
                                                    << ", bisecting");
    auto b_for_a = [&](double a) -> double {
      const BoundaryCandidate c = coefficients_from_a(model, a);
      auto slope_res = [&](double lbq) {
        const double b = std::exp(lbq);
        cache.ensure(b);
        return basis_slope(model, c, b) - cache.slope;
      };
      double lo = lb_min, hi = lb_max;
      if (slope_res(lo) >= 0.0) return lo;  // too steep already at z0
      if (slope_res(hi) <= 0.0) return hi;  // never catches the obstacle
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (slope_res(mid) < 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    };
    auto value_res = [&](double laq) {
      const double a = std::exp(laq);
      const double lbq = b_for_a(a);
      const BoundaryCandidate c = coefficients_from_a(model, a);
      const double b = std::exp(lbq);
      cache.ensure(b);
      return basis_value(model, c, b) - cache.value;
    };
    double lo = la_min, hi = la_max;
    const double h_lo = value_res(lo), h_hi = value_res(hi);
    if (!(h_lo > 0.0 && h_hi < 0.0))
      throw NoConvergence(
          "free-boundary system: no bracket for the lower boundary");
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (value_res(mid) > 0.0 ? lo : hi) = mid;
    }
    la = 0.5 * (lo + hi);
    lb = b_for_a(std::exp(la));
    f = eval(la, lb);
    run_newton();  // polish from the bisection point
  }

  if (f.norm() > kAcceptTol)
    throw NoConvergence("free-boundary residual " + std::to_string(f.norm()) +
                        " above tolerance");

  BoundaryCandidate cand = coefficients_from_a(model, std::exp(la));
  cand.b = std::exp(lb);
  return cand;
}

std::pair<ValueFunction, BoundaryCandidate> apply_gamma_tilde(
    const PiTransform& pi, const ValueFunction& g,
    const BoundaryCandidate* hint) {
  const Model& model = pi.model();
  const auto z0_opt = pi.crossing_z0(g);
  if (!z0_opt)
    throw StructureViolation(
        "Pi g exceeds the lit payoff at zmin: no lit region inside the grid");
  const double z0 = *z0_opt;

  const Obstacle obstacle{
      [&](double z) { return pi.apply_pi(g, z); },
      [&](double z) { return pi.apply_pi_derivative(g, z); }};
  BoundaryCandidate cand = solve_boundaries(model, obstacle, z0,
                                            g.grid().zmin(), g.grid().zmax(),
                                            hint);

  const std::vector<double> pig = pi.pi_on_grid(g);
  const LogGrid& grid = g.grid();
  const double lit = model.lit();
  std::vector<double> vals(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const double z = grid.z(i);
    if (z <= cand.a) {
      vals[i] = lit;
    } else if (z < cand.b) {
      vals[i] = basis_value(model, cand, z);
    } else {
      vals[i] = pig[i];
    }
  }
  const auto [tc0, tc1] = pi.tail_image(g.tail_c0(), g.tail_c1());
  ValueFunction next(g.grid_ptr(), std::move(vals), tc0, tc1);

  for (int i = 0; i < grid.size(); ++i) {
    const double z = grid.z(i);
    const double payoff = std::max(lit, pig[i]);
    if (next.value_at(i) < payoff - 1e-8 * (1.0 + z))
      throw StructureViolation(
          "iterate fails to dominate the stopping payoff at z = " +
          std::to_string(z));
  }
  return {std::move(next), cand};
}

}  // namespace restop
