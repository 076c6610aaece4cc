#include "restop/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "restop/errors.hpp"
#include "restop/log.hpp"
#include "restop/rng.hpp"

namespace restop {

namespace {

constexpr long kMaxAttemptsPerPath = 1000000;

// Log-space coefficients for an exact GBM step of arbitrary size.
struct StepDyn {
  double s_drift, s_vol, k_drift, k_vol, nu, nu_perp;
};

StepDyn make_dyn(const Model& model) {
  const auto& p = model.params();
  return {p.mu1 - 0.5 * p.sigma1 * p.sigma1, p.sigma1,
          p.mu2 - 0.5 * p.sigma2 * p.sigma2, p.sigma2, p.nu,
          std::sqrt(std::max(0.0, 1.0 - p.nu * p.nu))};
}

void step(const StepDyn& d, double h, PathRng& rng, double& s, double& k) {
  const double sq = std::sqrt(h);
  const double x1 = rng.normal();
  const double x2 = rng.normal();
  s *= std::exp(d.s_drift * h + d.s_vol * sq * x1);
  k *= std::exp(d.k_drift * h + d.k_vol * sq * (d.nu * x1 + d.nu_perp * x2));
}

struct PathTally {
  long lit = 0, dark = 0, fail = 0, trunc = 0;
};

double run_path(const Model& model, const TradingRule& rule,
                const PathConfig& cfg, const StepDyn& dyn, double t_max,
                bool oneoff, long path_index, PathTally& tally,
                double& stop_time, double& attempts_out,
                std::vector<PathEvent>* events) {
  PathRng rng(cfg.master_seed, static_cast<std::uint64_t>(path_index));
  const double r = model.params().r;
  const double p = model.params().p;
  const double lit = model.lit();
  double s = cfg.s0, k = cfg.k0, t = 0.0;
  long attempts = 0;
  auto ev = [&](EventKind kind) {
    if (events) events->push_back({path_index, t, s, k, kind});
  };

  for (;;) {
    const Region reg = classify(rule, s, k);
    if (reg == Region::SellLit) {
      ++tally.lit;
      ev(EventKind::Lit);
      stop_time = t;
      attempts_out = static_cast<double>(attempts);
      return std::exp(-r * t) * lit * s;
    }
    if (reg == Region::SellDark) {
      if (++attempts > kMaxAttemptsPerPath)
        throw NoConvergence("simulation path stuck in dark retries");
      ev(EventKind::DarkTry);
      const double theta = model.delay().sample(rng.uniform());
      if (theta > 0.0) step(dyn, theta, rng, s, k);
      t += theta;
      if (rng.uniform() < p) {
        ++tally.dark;
        ev(EventKind::DarkFill);
        stop_time = t;
        attempts_out = static_cast<double>(attempts);
        return std::exp(-r * t) * (s + k);
      }
      ++tally.fail;
      ev(EventKind::DarkFail);
      if (oneoff) {
        ++tally.lit;
        ev(EventKind::Lit);
        stop_time = t;
        attempts_out = static_cast<double>(attempts);
        return std::exp(-r * t) * lit * s;
      }
      continue;
    }
    // Continue region: truncate at the horizon, else diffuse one step.
    if (t >= t_max) {
      ++tally.trunc;
      ev(EventKind::Trunc);
      stop_time = t;
      attempts_out = static_cast<double>(attempts);
      return std::exp(-r * t) * lit * s;
    }
    step(dyn, cfg.dt, rng, s, k);
    t += cfg.dt;
  }
}

SimReport simulate_core(const Model& model, const TradingRule& rule,
                        const PathConfig& cfg, bool oneoff,
                        std::vector<double>* per_path_payoffs) {
  if (cfg.n_paths < 1) throw DomainError("simulate needs n_paths >= 1");
  if (!(cfg.dt > 0.0)) throw DomainError("simulate needs dt > 0");
  if (!(cfg.s0 > 0.0) || !(cfg.k0 > 0.0))
    throw DomainError("simulate needs s0 > 0 and k0 > 0");
  const double disc = model.consts().disc;
  double t_max = cfg.t_max;
  if (t_max <= 0.0) {
    if (!(disc > 0.0))
      throw DomainError("simulate needs an explicit t_max when disc == 0");
    t_max = 100.0 / disc;
  } else if (disc > 0.0 && t_max < 20.0 / disc) {
    RESTOP_WARN("t_max = " << t_max << " is short against the discount "
                           << "scale; truncation bias may be visible");
  }

  const StepDyn dyn = make_dyn(model);
  const long n = cfg.n_paths;
  std::vector<double> vals(n), stop_t(n), att(n);
  SimReport rep;
  rep.n_paths = n;

  const bool serial = cfg.record_events || !cfg.parallel;
  std::vector<PathEvent>* events = cfg.record_events ? &rep.events : nullptr;
  long lit = 0, dark = 0, fail = 0, trunc = 0;
  long bad_paths = 0;  // exceptions must not unwind out of the omp region
#pragma omp parallel for schedule(static) if (!serial) \
    reduction(+ : lit, dark, fail, trunc, bad_paths)
  for (long i = 0; i < n; ++i) {
    PathTally tally;
    try {
      vals[i] = run_path(model, rule, cfg, dyn, t_max, oneoff, i, tally,
                         stop_t[i], att[i], events);
    } catch (const std::exception&) {
      ++bad_paths;
      continue;
    }
    lit += tally.lit;
    dark += tally.dark;
    fail += tally.fail;
    trunc += tally.trunc;
  }
  if (bad_paths > 0)
    throw NoConvergence("simulation aborted: " + std::to_string(bad_paths) +
                        " paths stuck in dark retries");
  rep.lit_fills = lit;
  rep.dark_fills = dark;
  rep.dark_failures = fail;
  rep.truncations = trunc;
  if (rep.lit_fills + rep.dark_fills + rep.truncations != n)
    throw StructureViolation("path accounting broke: outcomes != n_paths");

  double mean = 0.0;
  for (const double v : vals) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const double v : vals) ss += (v - mean) * (v - mean);
  const double sd =
      n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  rep.mean = mean;
  rep.stderr_ = sd / std::sqrt(static_cast<double>(n));
  rep.ci_low = mean - 1.96 * rep.stderr_;
  rep.ci_high = mean + 1.96 * rep.stderr_;
  rep.mean_stop_time =
      std::accumulate(stop_t.begin(), stop_t.end(), 0.0) /
      static_cast<double>(n);
  rep.mean_dark_attempts =
      std::accumulate(att.begin(), att.end(), 0.0) / static_cast<double>(n);
  if (per_path_payoffs) *per_path_payoffs = std::move(vals);
  return rep;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

KsReport weighted_ks(std::vector<double>& xs, std::vector<double>& ws,
                     double m, double sd) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  double wsum = 0.0, wsq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    wsum += ws[i];
    wsq += ws[i] * ws[i];
  }
  double cum = 0.0, d = 0.0;
  for (const std::size_t i : order) {
    const double phi = normal_cdf((xs[i] - m) / sd);
    d = std::max(d, std::abs(phi - cum / wsum));
    cum += ws[i];
    d = std::max(d, std::abs(phi - cum / wsum));
  }
  KsReport rep;
  rep.statistic = d;
  rep.n_effective = wsum * wsum / wsq;
  rep.critical_5pct = 1.358 / std::sqrt(rep.n_effective);
  rep.reject = d > rep.critical_5pct;
  return rep;
}

}  // namespace

const char* event_name(EventKind kind) {
  switch (kind) {
    case EventKind::Lit:
      return "LIT";
    case EventKind::DarkTry:
      return "DARK_TRY";
    case EventKind::DarkFill:
      return "DARK_FILL";
    case EventKind::DarkFail:
      return "DARK_FAIL";
    case EventKind::Trunc:
      return "TRUNC";
  }
  return "UNKNOWN";
}

SimReport simulate_recursive(const Model& model, const TradingRule& rule,
                             const PathConfig& config,
                             std::vector<double>* per_path_payoffs) {
  return simulate_core(model, rule, config, false, per_path_payoffs);
}

SimReport simulate_oneoff(const Model& model, const TradingRule& rule,
                          const PathConfig& config,
                          std::vector<double>* per_path_payoffs) {
  return simulate_core(model, rule, config, true, per_path_payoffs);
}

std::vector<std::pair<double, double>> sample_path(const Model& model,
                                                   const TradingRule& rule,
                                                   const PathConfig& config) {
  const PathConfig& cfg = config;
  if (!(cfg.dt > 0.0)) throw DomainError("sample_path needs dt > 0");
  if (!(cfg.s0 > 0.0) || !(cfg.k0 > 0.0))
    throw DomainError("sample_path needs s0 > 0 and k0 > 0");
  const double disc = model.consts().disc;
  double t_max = cfg.t_max;
  if (t_max <= 0.0) {
    if (!(disc > 0.0))
      throw DomainError("sample_path needs an explicit t_max when disc == 0");
    t_max = 100.0 / disc;
  }
  const StepDyn dyn = make_dyn(model);
  PathRng rng(cfg.master_seed, 0);
  const double p = model.params().p;
  double s = cfg.s0, k = cfg.k0, t = 0.0;
  std::vector<std::pair<double, double>> pts;
  constexpr std::size_t kMaxPoints = 200000;
  for (;;) {
    pts.emplace_back(s, k);
    if (pts.size() >= kMaxPoints) {
      RESTOP_WARN("sample_path stopped after " << kMaxPoints << " points");
      break;
    }
    const Region reg = classify(rule, s, k);
    if (reg == Region::SellLit) break;
    if (reg == Region::SellDark) {
      const double theta = model.delay().sample(rng.uniform());
      if (theta > 0.0) step(dyn, theta, rng, s, k);
      t += theta;
      if (rng.uniform() < p) {
        pts.emplace_back(s, k);
        break;
      }
      continue;
    }
    if (t >= t_max) break;
    step(dyn, cfg.dt, rng, s, k);
    t += cfg.dt;
  }
  return pts;
}

MartingaleReport martingale_diagnostic(const SolveResult& result, double z,
                                       double t, long n_paths,
                                       std::uint64_t seed, double dt) {
  if (!(z > 0.0) || !(t > 0.0) || !(dt > 0.0) || n_paths < 2)
    throw DomainError("martingale_diagnostic needs z, t, dt > 0, n >= 2");
  const auto& c = result.model.consts();
  const double m_dt = (c.z_drift - 0.5 * c.beta_sq) * dt;
  const double s_dt = std::sqrt(c.beta_sq * dt);
  const long n_steps = static_cast<long>(std::ceil(t / dt));
  const double a = result.a_star, b = result.b_star;

  std::vector<double> stopped(n_paths), unstopped(n_paths);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n_paths; ++i) {
    PathRng rng(seed, static_cast<std::uint64_t>(i));
    double x = std::log(z);
    bool live = true;
    double stop_val = 0.0;
    for (long j = 0; j <= n_steps; ++j) {
      const double tj = std::min(static_cast<double>(j) * dt, t);
      const double zj = std::exp(x);
      if (live && (zj <= a || zj >= b || j == n_steps)) {
        stop_val = std::exp(-c.disc * tj) * result.eval(zj);
        live = false;
      }
      if (j == n_steps) {
        unstopped[i] = std::exp(-c.disc * t) * result.eval(zj);
        break;
      }
      x += m_dt + s_dt * rng.normal();
    }
    stopped[i] = stop_val;
  }

  auto mean_se = [n_paths](const std::vector<double>& v, double& mean,
                           double& se) {
    mean = std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(n_paths);
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / static_cast<double>(n_paths - 1)) /
         std::sqrt(static_cast<double>(n_paths));
  };
  MartingaleReport rep;
  rep.n_paths = n_paths;
  rep.u_at_z = result.eval(z);
  mean_se(stopped, rep.stopped_mean, rep.stopped_stderr);
  mean_se(unstopped, rep.unstopped_mean, rep.unstopped_stderr);
  return rep;
}

KsReport ks_ratio_reweighted(const Model& model, double z0, double t,
                             long n_paths, std::uint64_t seed) {
  if (!(z0 > 0.0) || !(t > 0.0) || n_paths < 10)
    throw DomainError("ks_ratio_reweighted needs z0, t > 0, n >= 10");
  const auto& c = model.consts();
  const StepDyn dyn = make_dyn(model);
  const double mu1 = model.params().mu1;
  std::vector<double> xs(n_paths), ws(n_paths);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n_paths; ++i) {
    PathRng rng(seed, static_cast<std::uint64_t>(i));
    double s = 1.0, k = z0;
    step(dyn, t, rng, s, k);
    xs[i] = std::log(k / s);
    ws[i] = s * std::exp(-mu1 * t);
  }
  const double m = std::log(z0) + (c.z_drift - 0.5 * c.beta_sq) * t;
  const double sd = std::sqrt(c.beta_sq * t);
  return weighted_ks(xs, ws, m, sd);
}

KsReport ks_direct_z(const Model& model, double z0, double t, long n_paths,
                     std::uint64_t seed) {
  if (!(z0 > 0.0) || !(t > 0.0) || n_paths < 10)
    throw DomainError("ks_direct_z needs z0, t > 0, n >= 10");
  const auto& c = model.consts();
  const double m = std::log(z0) + (c.z_drift - 0.5 * c.beta_sq) * t;
  const double sd = std::sqrt(c.beta_sq * t);
  std::vector<double> xs(n_paths), ws(n_paths, 1.0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n_paths; ++i) {
    PathRng rng(seed, static_cast<std::uint64_t>(i));
    xs[i] = m + sd * rng.normal();
  }
  return weighted_ks(xs, ws, m, sd);
}

MarginalsReport gbm_marginals_check(const Model& model, double t,
                                    long n_steps, long n_paths,
                                    std::uint64_t seed) {
  if (!(t > 0.0) || n_steps < 1 || n_paths < 2)
    throw DomainError("gbm_marginals_check needs t > 0, n_steps, n >= 2");
  const StepDyn dyn = make_dyn(model);
  const double dt = t / static_cast<double>(n_steps);
  const double sq = std::sqrt(dt);
  std::vector<double> fs(n_paths), fk(n_paths);
  std::vector<double> sa(n_paths), sb(n_paths), sab(n_paths), saa(n_paths),
      sbb(n_paths);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n_paths; ++i) {
    PathRng rng(seed, static_cast<std::uint64_t>(i));
    double ls = 0.0, lk = 0.0;
    double pa = 0.0, pb = 0.0, pab = 0.0, paa = 0.0, pbb = 0.0;
    for (long j = 0; j < n_steps; ++j) {
      const double x1 = rng.normal();
      const double x2 = rng.normal();
      const double da = dyn.s_drift * dt + dyn.s_vol * sq * x1;
      const double db = dyn.k_drift * dt +
                        dyn.k_vol * sq * (dyn.nu * x1 + dyn.nu_perp * x2);
      ls += da;
      lk += db;
      pa += da;
      pb += db;
      pab += da * db;
      paa += da * da;
      pbb += db * db;
    }
    fs[i] = std::exp(ls);
    fk[i] = std::exp(lk);
    sa[i] = pa;
    sb[i] = pb;
    sab[i] = pab;
    saa[i] = paa;
    sbb[i] = pbb;
  }
  const auto& p = model.params();
  MarginalsReport rep;
  rep.n_paths = n_paths;
  rep.exact_s = std::exp(p.mu1 * t);
  rep.exact_k = std::exp(p.mu2 * t);
  rep.exact_corr = p.nu;

  auto mean_se = [n_paths](const std::vector<double>& v, double& mean,
                           double& se) {
    mean = std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(n_paths);
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / static_cast<double>(n_paths - 1)) /
         std::sqrt(static_cast<double>(n_paths));
  };
  mean_se(fs, rep.mean_s, rep.se_s);
  mean_se(fk, rep.mean_k, rep.se_k);

  const double nn = static_cast<double>(n_paths) *
                    static_cast<double>(n_steps);
  const double ma = std::accumulate(sa.begin(), sa.end(), 0.0) / nn;
  const double mb = std::accumulate(sb.begin(), sb.end(), 0.0) / nn;
  const double mab = std::accumulate(sab.begin(), sab.end(), 0.0) / nn;
  const double maa = std::accumulate(saa.begin(), saa.end(), 0.0) / nn;
  const double mbb = std::accumulate(sbb.begin(), sbb.end(), 0.0) / nn;
  const double cov = mab - ma * mb;
  const double va = maa - ma * ma;
  const double vb = mbb - mb * mb;
  rep.corr = cov / std::sqrt(va * vb);
  rep.se_corr = (1.0 - rep.corr * rep.corr) / std::sqrt(nn);
  return rep;
}

}  // namespace restop
