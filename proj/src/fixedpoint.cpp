#include "restop/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "restop/errors.hpp"
#include "restop/log.hpp"
#include "restop/rng.hpp"

namespace restop {

namespace {

void check_options(const SolverOptions& o) {
  if (!(o.zmin > 0.0 && o.zmax > o.zmin))
    throw DomainError("options need 0 < zmin < zmax");
  if (o.grid_n < 16) throw DomainError("options need grid_n >= 16");
  if (!(o.fp_tol > 0.0)) throw DomainError("options need fp_tol > 0");
  if (o.max_iter < 1) throw DomainError("options need max_iter >= 1");
}

SolveResult closed_form_result(const Model& model, const SolverOptions& opts,
                               double c0, double c1) {
  auto grid = LogGrid::make(opts.zmin, opts.zmax, opts.grid_n);
  SolveResult res{model, opts, ValueFunction::affine(grid, c0, c1)};
  res.closed_form = true;
  return res;
}

}  // namespace

double SolveResult::eval(double z) const {
  if (!(z > 0.0) || !std::isfinite(z))
    throw DomainError("SolveResult eval needs z > 0");
  if (closed_form) return u.tail_c0() + u.tail_c1() * z;
  if (z <= a_star) return model.lit();
  if (z < b_star) {
    const BoundaryCandidate cand{a_star, b_star, C1, C2};
    return basis_value(model, cand, z);
  }
  // Stop region: u equals the dark payoff Pi u. Re-applying the quadrature
  // to the stored grid function keeps the derivative accurate; the raw
  // grid interpolant is only first order in the cell width, which would
  // put an O(h) kink in u' at b*.
  const PiTransform pi(model, options.hermite_n);
  return pi.apply_pi(u, z);
}

double SolveResult::eval_prime(double z) const {
  if (!(z > 0.0) || !std::isfinite(z))
    throw DomainError("SolveResult eval needs z > 0");
  if (closed_form) return u.tail_c1();
  if (z <= a_star) return 0.0;
  if (z < b_star) {
    const BoundaryCandidate cand{a_star, b_star, C1, C2};
    return basis_slope(model, cand, z);
  }
  const PiTransform pi(model, options.hermite_n);
  return pi.apply_pi_derivative(u, z);
}

SolveResult solve(const Model& model, const SolverOptions& options) {
  check_options(options);

  if (model.delay().atom_at_zero() == 1.0) {
    // Instant resolution: retrying the dark order is free, u(z) = 1 + z.
    return closed_form_result(model, options, 1.0, 1.0);
  }
  if (model.regime() == Regime::REqualsMu1) {
    // No discounting of the lit leg; the dark order dominates everywhere
    // and the value is the affine fixed-point tail itself.
    const auto [c0, c1] = model.tail_coefficients();
    return closed_form_result(model, options, c0, c1);
  }

  const auto grid = LogGrid::make(options.zmin, options.zmax, options.grid_n);
  PiTransform pi(model, options.hermite_n);

  ValueFunction g = ValueFunction::constant(grid, model.lit());
  BoundaryCandidate cand;
  bool have_cand = false;
  std::vector<double> history;
  std::vector<std::pair<double, double>> boundary_history;
  double delta = 0.0;

  for (int it = 1; it <= options.max_iter; ++it) {
    auto [next, c] = apply_gamma_tilde(pi, g, have_cand ? &cand : nullptr);
    delta = weighted_distance(next, g);
    history.push_back(delta);
    boundary_history.emplace_back(c.a, c.b);
    g = std::move(next);
    cand = c;
    have_cand = true;
    RESTOP_DEBUG("fixed point iter " << it << " delta " << delta);
    if (delta <= options.fp_tol) {
      const auto z0 = pi.crossing_z0(g);
      if (!z0)
        throw StructureViolation("converged iterate lost its lit region");
      SolveResult res{model, options, std::move(g)};
      res.a_star = cand.a;
      res.b_star = cand.b;
      res.C1 = cand.C1;
      res.C2 = cand.C2;
      res.z0 = *z0;
      res.iterations = it;
      res.residual = delta;
      res.history = std::move(history);
      res.boundary_history = std::move(boundary_history);
      if (res.a_star <= options.zmin * (1.0 + 1e-9))
        RESTOP_WARN("lower boundary sits at the grid edge; widen zmin");
      return res;
    }
  }
  throw MaxIterations("fixed point: " + std::to_string(options.max_iter) +
                      " iterations without reaching tolerance (last delta " +
                      std::to_string(delta) + ")");
}

ZeroLimitReport u_at_zero_check(const SolveResult& result) {
  PiTransform pi(result.model, result.options.hermite_n);
  ZeroLimitReport rep;
  rep.lit = result.model.lit();
  rep.u_at_zmin = result.u.value_at(0);
  rep.pi_at_zmin = pi.apply_pi(result.u, result.u.grid().zmin());
  rep.lit_optimal_near_zero =
      std::abs(rep.u_at_zmin - rep.lit) <= 1e-9 * (1.0 + rep.lit) &&
      rep.pi_at_zmin <= rep.lit;
  return rep;
}

namespace {

// Random admissible iterate: convex, non-decreasing, g(zmin) = lit, with
// the affine tail continuing the final slope.
ValueFunction random_admissible(const std::shared_ptr<const LogGrid>& grid,
                                double lit, SplitMix64& rng) {
  const int n = grid->size();
  std::vector<double> slope(n - 1);
  double s = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    s += rng.uniform();
    slope[i] = s;
  }
  const double target = 0.1 + 1.1 * rng.uniform();  // final slope in (0.1,1.2)
  const double scale = target / slope.back();
  std::vector<double> v(n);
  v[0] = lit;
  for (int i = 0; i + 1 < n; ++i)
    v[i + 1] = v[i] + scale * slope[i] * (grid->z(i + 1) - grid->z(i));
  const double c1 = scale * slope.back();
  const double c0 = v.back() - c1 * grid->zmax();
  return ValueFunction(grid, std::move(v), c0, c1);
}

}  // namespace

ContractionReport contraction_certificate(const Model& model, int trials,
                                          std::uint64_t seed,
                                          const SolverOptions& options) {
  check_options(options);
  if (model.delay().atom_at_zero() == 1.0)
    throw DomainError("contraction certificate needs a delay with F0 < 1");
  const auto grid = LogGrid::make(options.zmin, options.zmax, options.grid_n);
  PiTransform pi(model, options.hermite_n);
  SplitMix64 rng(seed);

  ContractionReport rep;
  rep.bound =
      (1.0 - model.params().p) * std::max(model.m0(), model.m1());
  for (int t = 0; t < trials; ++t) {
    const ValueFunction g = random_admissible(grid, model.lit(), rng);
    const ValueFunction h = random_admissible(grid, model.lit(), rng);
    const double d0 = weighted_distance(g, h);
    if (d0 < 1e-9) {
      ++rep.skipped;
      continue;
    }
    const ValueFunction tg = apply_gamma_tilde(pi, g).first;
    const ValueFunction th = apply_gamma_tilde(pi, h).first;
    const double d1 = weighted_distance(tg, th);
    rep.max_ratio = std::max(rep.max_ratio, d1 / d0);
    ++rep.trials;
  }
  return rep;
}

}  // namespace restop
