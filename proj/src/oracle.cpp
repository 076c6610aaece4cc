#include "restop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "restop/errors.hpp"
#include "restop/log.hpp"
#include "restop/quadrature.hpp"
#include "restop/rng.hpp"

namespace restop {

namespace {

// One-step transition collapsed over Gauss-Hermite nodes: on a
// log-uniform grid every row shares the same fractional log-shifts, so
// the expectation becomes a fixed stencil of relative offsets. Each GH
// node is spread onto 4 neighbouring grid nodes with cubic Lagrange
// coefficients (2nd-order-plus accuracy, coefficients sum to 1 exactly).
struct Kernel {
  int kmin = 0, kmax = 0;
  std::vector<double> omega;  // offset k -> omega[k - kmin]
  std::vector<double> ek;     // e^{k dlog}, aligned with omega
  double df = 1.0;            // e^{-disc dt}
};

Kernel build_kernel(const Model& model, const LogGrid& grid, double dt,
                    int hermite_n) {
  const auto& c = model.consts();
  const GaussRule gh = gauss_hermite(hermite_n);
  const double m = (c.z_drift - 0.5 * c.beta_sq) * dt;
  const double s = std::sqrt(c.beta_sq * dt);
  const double dlog = grid.dlog();
  const double inv_sqrt_pi = 0.5641895835477562869;

  const int n = static_cast<int>(gh.x.size());
  std::vector<int> base(n);
  std::vector<double> frac(n);
  int kmin = 0, kmax = 0;
  for (int j = 0; j < n; ++j) {
    const double shift = (m + std::sqrt(2.0) * s * gh.x[j]) / dlog;
    const double fl = std::floor(shift);
    base[j] = static_cast<int>(fl);
    frac[j] = shift - fl;
    kmin = std::min(kmin, base[j] - 1);
    kmax = std::max(kmax, base[j] + 2);
  }

  Kernel ker;
  ker.kmin = kmin;
  ker.kmax = kmax;
  ker.omega.assign(kmax - kmin + 1, 0.0);
  for (int j = 0; j < n; ++j) {
    const double f = frac[j];
    const double w = gh.w[j] * inv_sqrt_pi;
    const double l_m1 = -f * (f - 1.0) * (f - 2.0) / 6.0;
    const double l_0 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    const double l_1 = -(f + 1.0) * f * (f - 2.0) / 2.0;
    const double l_2 = (f + 1.0) * f * (f - 1.0) / 6.0;
    ker.omega[base[j] - 1 - kmin] += w * l_m1;
    ker.omega[base[j] - kmin] += w * l_0;
    ker.omega[base[j] + 1 - kmin] += w * l_1;
    ker.omega[base[j] + 2 - kmin] += w * l_2;
  }
  ker.ek.resize(ker.omega.size());
  for (int k = kmin; k <= kmax; ++k)
    ker.ek[k - kmin] = std::exp(k * dlog);
  ker.df = std::exp(-c.disc * dt);
  return ker;
}

// cont_i = df * E[w(Z_dt) | z_i]: grid values inside, flat extension
// below the grid, max(lit, tc0 + tc1*z) above it. With disc > 0 the top
// of any legal grid lies in the stop region, so above the grid w follows
// the payoff: the affine image of the source floored by the lit leg. The
// floor matters: the stencil's cubic lobes are signed, and extending with
// the bare affine tail where the lit leg binds puts a value jump at the
// splice that fakes continuation pockets in the edge rows.
void apply_kernel(const Kernel& ker, const LogGrid& grid,
                  const std::vector<double>& w, double lit, double tc0,
                  double tc1, bool parallel, std::vector<double>& cont) {
  const int n = grid.size();
  cont.resize(n);
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < n; ++i) {
    const double zi = grid.z(i);
    double acc = 0.0;
    for (int k = ker.kmin; k <= ker.kmax; ++k) {
      const int j = i + k;
      double v;
      if (j < 0) {
        v = w[0];
      } else if (j >= n) {
        v = std::max(lit, tc0 + tc1 * zi * ker.ek[k - ker.kmin]);
      } else {
        v = w[j];
      }
      acc += ker.omega[k - ker.kmin] * v;
    }
    cont[i] = ker.df * acc;
  }
}

// Gaussian elimination on the banded system
//   w_i - df * sum_k omega_k w_{i+k} = rhs_i   (continuation rows)
//   w_i = G_i                                  (exercise rows in the span)
// over the contiguous index span covering the continuation set. Columns
// outside the span or the grid are folded into rhs by the caller.
// No pivoting: the diagonal stays O(1) for these near-stochastic rows
// with df < 1; the outer loop's residual certificate would catch any
// instability.
void solve_banded(std::vector<double>& band, std::vector<double>& rhs,
                  int nspan, int bw_lo, int bw_hi) {
  const int width = bw_lo + bw_hi + 1;
  for (int r = 0; r < nspan; ++r) {
    const double piv = band[r * width + bw_lo];
    if (!(std::abs(piv) > 1e-12))
      throw NoConvergence("bermudan policy system: vanishing pivot");
    const int last = std::min(nspan - 1, r + bw_lo);
    for (int rr = r + 1; rr <= last; ++rr) {
      const int off = r - rr + bw_lo;  // column r in row rr
      const double coef = band[rr * width + off];
      if (coef == 0.0) continue;
      const double mult = coef / piv;
      for (int k = 0; k <= bw_hi; ++k) {
        const int col_rr = off + k;
        band[rr * width + col_rr] -= mult * band[r * width + bw_lo + k];
      }
      rhs[rr] -= mult * rhs[r];
    }
  }
  for (int r = nspan - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int k = 1; k <= bw_hi; ++k) {
      const int j = r + k;
      if (j >= nspan) break;
      acc -= band[r * width + bw_lo + k] * rhs[j];
    }
    rhs[r] = acc / band[r * width + bw_lo];
  }
}

// One policy-iteration pass for a fixed payoff G. w is updated in place;
// returns rounds used. Convergence: exercise set stable and weighted
// residual <= tol.
long policy_solve(const Kernel& ker, const LogGrid& grid,
                  const std::vector<double>& G, double lit, double tc0,
                  double tc1, bool parallel, double tol,
                  std::vector<double>& w) {
  const int n = grid.size();
  std::vector<double> cont(n), band, rhs;
  std::vector<char> ex(n, 1), ex_prev;
  long rounds = 0;

  for (int round = 0; round < 200; ++round) {
    ++rounds;
    apply_kernel(ker, grid, w, lit, tc0, tc1, parallel, cont);
    ex_prev = ex;
    int first_cont = -1, last_cont = -1;
    for (int i = 0; i < n; ++i) {
      ex[i] = G[i] >= cont[i] ? 1 : 0;
      if (!ex[i]) {
        if (first_cont < 0) first_cont = i;
        last_cont = i;
      }
    }
    if (first_cont < 0) {  // exercise everywhere
      for (int i = 0; i < n; ++i) w[i] = G[i];
      if (round > 0 && ex == ex_prev) return rounds;
      continue;
    }

    double resid = 0.0;
    for (int i = 0; i < n; ++i)
      resid = std::max(resid, std::abs(w[i] - std::max(G[i], cont[i])) /
                                  (1.0 + grid.z(i)));
    if (round > 0 && ex == ex_prev && resid <= tol) return rounds;

    const int nspan = last_cont - first_cont + 1;
    const int bw_lo = -ker.kmin;
    const int bw_hi = ker.kmax;
    const int width = bw_lo + bw_hi + 1;
    band.assign(static_cast<std::size_t>(nspan) * width, 0.0);
    rhs.assign(nspan, 0.0);
    for (int r = 0; r < nspan; ++r) {
      const int i = first_cont + r;
      if (ex[i]) {
        band[r * width + bw_lo] = 1.0;
        rhs[r] = G[i];
        continue;
      }
      const double zi = grid.z(i);
      band[r * width + bw_lo] = 1.0;
      double rr = 0.0;
      for (int k = ker.kmin; k <= ker.kmax; ++k) {
        const double coef = ker.df * ker.omega[k - ker.kmin];
        const int j = i + k;
        const int jc = std::max(j, 0);  // below-grid flat extension
        if (j >= n) {
          rr += coef * std::max(lit, tc0 + tc1 * zi * ker.ek[k - ker.kmin]);
        } else if (jc < first_cont || jc > last_cont) {
          rr += coef * G[jc];  // exercised outside the span
        } else {
          band[r * width + (jc - i) + bw_lo] -= coef;
        }
      }
      rhs[r] = rr;
    }
    solve_banded(band, rhs, nspan, bw_lo, bw_hi);
    for (int i = 0; i < n; ++i) {
      if (i < first_cont || i > last_cont) {
        w[i] = G[i];
      } else {
        w[i] = ex[i] ? G[i] : rhs[i - first_cont];
      }
    }
  }
  throw NoConvergence("bermudan policy iteration failed to stabilize");
}

struct Boundaries {
  int a_idx = -1, b_idx = -1;
  double a_est = 0.0, b_est = 0.0;
  bool empty_continuation = false;
};

// Reads the exercise boundaries off h = cont - G: the continuation set
// must be one interval. Sub-cell positions from the log-linear root of h.
Boundaries read_boundaries(const LogGrid& grid, const std::vector<double>& G,
                           const std::vector<double>& cont) {
  const int n = grid.size();
  std::vector<double> h(n);
  for (int i = 0; i < n; ++i) h[i] = cont[i] - G[i];

  int first = -1, last = -1, flips = 0;
  for (int i = 0; i < n; ++i) {
    if (h[i] > 0.0) {
      if (first < 0) first = i;
      last = i;
    }
    if (i > 0 && (h[i] > 0.0) != (h[i - 1] > 0.0)) ++flips;
  }
  Boundaries out;
  if (first < 0) {
    out.empty_continuation = true;
    return out;
  }
  if (flips != 2 || first == 0 || last == n - 1)
    throw StructureViolation(
        "bermudan exercise set is not of the form [0,a] union [b,inf)");

  out.a_idx = first - 1;
  out.b_idx = last + 1;
  // log-linear interpolation of the sign change on each side
  const double la0 = std::log(grid.z(first - 1));
  const double fa = h[first - 1] / (h[first - 1] - h[first]);
  out.a_est = std::exp(la0 + fa * grid.dlog());
  const double lb0 = std::log(grid.z(last));
  const double fb = h[last] / (h[last] - h[last + 1]);
  out.b_est = std::exp(lb0 + fb * grid.dlog());
  return out;
}

}  // namespace

BermudanResult bermudan_solve(const Model& model,
                              std::shared_ptr<const LogGrid> grid,
                              const ValueFunction* frozen_payoff_source,
                              const BermudanConfig& config) {
  if (!(config.dt > 0.0)) throw DomainError("bermudan needs dt > 0");
  if (!(model.consts().disc > 0.0))
    throw DomainError("bermudan oracle needs the standard regime (disc > 0)");
  const int n = grid->size();
  const Kernel ker = build_kernel(model, *grid, config.dt, config.hermite_n);
  PiTransform pi(model, config.hermite_n);
  const double lit = model.lit();

  double tc0, tc1;
  if (frozen_payoff_source != nullptr) {
    std::tie(tc0, tc1) = pi.tail_image(frozen_payoff_source->tail_c0(),
                                       frozen_payoff_source->tail_c1());
  } else {
    std::tie(tc0, tc1) = model.tail_coefficients();
  }

  // Payoff on the grid; refreshed from the iterate in full-oracle mode.
  std::vector<double> G(n);
  auto refresh_payoff = [&](const ValueFunction& src) {
    const std::vector<double> pig = pi.pi_on_grid(src, config.parallel);
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      const double gi = std::max(lit, pig[i]);
      moved = std::max(moved, std::abs(gi - G[i]) / (1.0 + grid->z(i)));
      G[i] = gi;
    }
    return moved;
  };

  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = std::max(lit, tc0 + tc1 * grid->z(i));

  long sweeps = 0;
  int refreshes = 0;
  const bool full = frozen_payoff_source == nullptr;

  if (full) {
    ValueFunction wf(grid, w, tc0, tc1);
    refresh_payoff(wf);
    ++refreshes;
  } else {
    refresh_payoff(*frozen_payoff_source);
  }

  if (config.use_policy_iteration) {
    for (int outer = 0;; ++outer) {
      sweeps += policy_solve(ker, *grid, G, lit, tc0, tc1, config.parallel,
                             config.sweep_tol, w);
      if (!full) break;
      ValueFunction wf(grid, w, tc0, tc1);
      const double moved = refresh_payoff(wf);
      ++refreshes;
      RESTOP_DEBUG("bermudan refresh " << refreshes << " moved " << moved);
      if (moved <= config.refresh_tol) break;
      if (outer + 1 >= config.max_refresh)
        throw NoConvergence("bermudan payoff refresh failed to converge");
    }
  } else {
    // Plain value iteration; payoff refresh every pi_refresh_every sweeps
    // in full mode.
    std::vector<double> cont(n);
    double change = 0.0, moved = 0.0;
    for (long sweep = 1;; ++sweep) {
      if (sweep > config.max_sweeps)
        throw NoConvergence("bermudan value iteration hit max_sweeps");
      apply_kernel(ker, *grid, w, lit, tc0, tc1, config.parallel, cont);
      change = 0.0;
      for (int i = 0; i < n; ++i) {
        const double wn = std::max(G[i], cont[i]);
        change = std::max(change, std::abs(wn - w[i]) / (1.0 + grid->z(i)));
        w[i] = wn;
      }
      ++sweeps;
      moved = -1.0;
      if (full && (sweep % config.pi_refresh_every) == 0) {
        ValueFunction wf(grid, w, tc0, tc1);
        moved = refresh_payoff(wf);
        ++refreshes;
      }
      if (change <= config.sweep_tol && (!full || moved < 0.0 ||
                                         moved <= config.refresh_tol)) {
        if (!full) break;
        ValueFunction wf(grid, w, tc0, tc1);
        const double final_moved = refresh_payoff(wf);
        ++refreshes;
        if (final_moved <= config.refresh_tol) break;
      }
    }
  }

  std::vector<double> cont(n);
  apply_kernel(ker, *grid, w, lit, tc0, tc1, config.parallel, cont);
  double residual = 0.0;
  for (int i = 0; i < n; ++i)
    residual = std::max(residual, std::abs(w[i] - std::max(G[i], cont[i])) /
                                      (1.0 + grid->z(i)));

  const Boundaries bd = read_boundaries(*grid, G, cont);
  BermudanResult res{ValueFunction(grid, std::move(w), tc0, tc1),
                     bd.a_idx,
                     bd.b_idx,
                     bd.a_est,
                     bd.b_est,
                     sweeps,
                     refreshes,
                     residual};
  return res;
}

RichardsonResult boundary_sweep(const Model& model,
                                std::shared_ptr<const LogGrid> grid,
                                double dt_finest, const BermudanConfig& base) {
  if (!(dt_finest > 0.0)) throw DomainError("boundary_sweep needs dt > 0");
  RichardsonResult out;
  out.dts = {4.0 * dt_finest, 2.0 * dt_finest, dt_finest};

  BermudanConfig cfg = base;
  for (const double dt : out.dts) {
    cfg.dt = dt;
    const BermudanResult res = bermudan_solve(model, grid, nullptr, cfg);
    if (res.a_idx < 0)
      throw StructureViolation("boundary_sweep needs a two-sided boundary");
    out.a_raw.push_back(res.a_est);
    out.b_raw.push_back(res.b_est);
  }

  // Empirical-order Richardson: with halving steps, err ~ C dt^p gives
  // p = log2 of the ratio of successive differences.
  auto extrapolate = [](const std::vector<double>& v, double& order) {
    const double d01 = v[1] - v[0];
    const double d12 = v[2] - v[1];
    if (std::abs(d12) < 1e-13 || d01 * d12 <= 0.0) {
      order = 0.0;  // differences too small or non-monotone: keep finest
      return v[2];
    }
    order = std::clamp(std::log2(d01 / d12), 0.4, 2.2);
    return v[2] + d12 / (std::pow(2.0, order) - 1.0);
  };
  out.a = extrapolate(out.a_raw, out.order_a);
  out.b = extrapolate(out.b_raw, out.order_b);
  return out;
}

HittingReport hitting_time_check(const Model& model, double z, double barrier,
                                 long n_paths, std::uint64_t seed, double dt,
                                 double t_max) {
  if (!(z > 0.0) || !(barrier > 0.0) || z == barrier)
    throw DomainError("hitting_time_check needs positive z != barrier");
  if (n_paths < 1 || !(dt > 0.0)) throw DomainError("bad MC parameters");
  const auto& c = model.consts();
  if (!(c.disc > 0.0))
    throw DomainError("hitting_time_check needs the standard regime");
  if (t_max <= 0.0) t_max = 20.0 / c.disc;

  const double m_dt = (c.z_drift - 0.5 * c.beta_sq) * dt;
  const double s_dt = std::sqrt(c.beta_sq * dt);
  const double var_dt = c.beta_sq * dt;
  const double level = std::log(barrier);
  const double x_init = std::log(z);
  const bool up = barrier > z;
  const long n_steps = static_cast<long>(std::ceil(t_max / dt));
  // Bridge probability is below 1e-18 when the endpoints' distance
  // product exceeds this; skip the exp there.
  const double skip_product = 21.0 * var_dt;

  std::vector<double> vals(n_paths);
#pragma omp parallel for schedule(static)
  for (long pidx = 0; pidx < n_paths; ++pidx) {
    PathRng rng(seed, static_cast<std::uint64_t>(pidx));
    double x = x_init;
    double val = 0.0;
    for (long k = 1; k <= n_steps; ++k) {
      const double x1 = x + m_dt + s_dt * rng.normal();
      bool crossed = up ? (x1 >= level) : (x1 <= level);
      if (!crossed) {
        // Brownian bridge: crossing probability of the level between
        // two same-side endpoints.
        const double d0 = up ? (level - x) : (x - level);
        const double d1 = up ? (level - x1) : (x1 - level);
        const double prod = d0 * d1;
        if (prod < skip_product) {
          const double pc = std::exp(-2.0 * prod / var_dt);
          if (rng.uniform() < pc) crossed = true;
        }
      }
      if (crossed) {
        val = std::exp(-c.disc * static_cast<double>(k) * dt);
        break;
      }
      x = x1;
    }
    vals[pidx] = val;
  }

  double mean = 0.0;
  for (const double v : vals) mean += v;
  mean /= static_cast<double>(n_paths);
  double ss = 0.0;
  for (const double v : vals) ss += (v - mean) * (v - mean);
  const double stderr_val =
      std::sqrt(ss / (static_cast<double>(n_paths) - 1.0)) /
      std::sqrt(static_cast<double>(n_paths));

  HittingReport rep;
  rep.z = z;
  rep.barrier = barrier;
  rep.estimate = mean;
  rep.stderr_val = stderr_val;
  rep.n_paths = n_paths;
  rep.closed_form = up ? std::pow(z / barrier, c.q1)
                       : std::pow(z / barrier, c.q2);
  return rep;
}

}  // namespace restop
