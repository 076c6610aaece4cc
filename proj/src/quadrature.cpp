#include "restop/quadrature.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <string>

#include "restop/errors.hpp"

namespace restop {

namespace {

// Orthonormal three-term recurrence
//   b_{k+1} p_{k+1}(x) = (x - a_k) p_k(x) - b_k p_{k-1}(x),  p_0 = 1/sqrt(mu0).
// Evaluates p_n, p_n' and the Christoffel sum over p_0..p_{n-1}.
struct Recurrence {
  std::function<double(int)> a;
  std::function<double(int)> b;  // b_k for k >= 1
  double mu0;
};

struct PolyEval {
  double p;         // p_n(x)
  double dp;        // p_n'(x)
  double christo;   // sum_{k=0}^{n-1} p_k(x)^2
};

PolyEval eval_poly(const Recurrence& rec, int n, double x) {
  double pkm1 = 0.0, pk = 1.0 / std::sqrt(rec.mu0);
  double dkm1 = 0.0, dk = 0.0;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += pk * pk;
    const double bk = (k >= 1) ? rec.b(k) : 0.0;
    const double bk1 = rec.b(k + 1);
    const double pk1 = ((x - rec.a(k)) * pk - bk * pkm1) / bk1;
    const double dk1 = (pk + (x - rec.a(k)) * dk - bk * dkm1) / bk1;
    pkm1 = pk; pk = pk1;
    dkm1 = dk; dk = dk1;
  }
  return {pk, dk, sum};
}

double bisect_root(const Recurrence& rec, int n, double lo, double hi) {
  double flo = eval_poly(rec, n, lo).p;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fmid = eval_poly(rec, n, mid).p;
    if ((flo < 0.0) == (fmid < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  // Newton polish; keep the bisection value if a step leaves the bracket.
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    const PolyEval e = eval_poly(rec, n, x);
    if (e.dp == 0.0) break;
    const double xn = x - e.p / e.dp;
    if (xn < lo || xn > hi) break;
    x = xn;
  }
  return x;
}

GaussRule rule_from_recurrence(const Recurrence& rec, int n,
                               const std::vector<double>& mesh,
                               const char* family) {
  GaussRule out;
  out.x.reserve(n);
  double fprev = eval_poly(rec, n, mesh[0]).p;
  for (std::size_t j = 1; j < mesh.size(); ++j) {
    const double fcur = eval_poly(rec, n, mesh[j]).p;
    if ((fprev < 0.0) != (fcur < 0.0)) {
      out.x.push_back(bisect_root(rec, n, mesh[j - 1], mesh[j]));
    }
    fprev = fcur;
  }
  if (static_cast<int>(out.x.size()) != n)
    throw NoConvergence(std::string("gauss rule root scan found ") +
                        std::to_string(out.x.size()) + " of " +
                        std::to_string(n) + " roots (" + family + ")");
  out.w.reserve(n);
  for (const double xi : out.x)
    out.w.push_back(1.0 / eval_poly(rec, n, xi).christo);
  return out;
}

void check_n(int n) {
  if (n < 1) throw DomainError("gauss rule needs n >= 1");
}

std::vector<double> linear_mesh(double lo, double hi, int m) {
  std::vector<double> mesh(m + 1);
  for (int j = 0; j <= m; ++j) mesh[j] = lo + (hi - lo) * j / m;
  return mesh;
}

}  // namespace

GaussRule gauss_legendre(int n) {
  check_n(n);
  Recurrence rec{
      [](int) { return 0.0; },
      [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); },
      2.0};
  // Roots lie strictly inside (-1, 1).
  return rule_from_recurrence(rec, n, linear_mesh(-1.0, 1.0, 10 * n + 10),
                              "legendre");
}

GaussRule gauss_laguerre(int n) {
  check_n(n);
  Recurrence rec{
      [](int k) { return 2.0 * k + 1.0; },
      [](int k) { return static_cast<double>(k); },
      1.0};
  // Roots cluster near 0 (smallest ~ pi^2/(4n)); use a quadratically
  // graded mesh up to an upper bound beyond the largest root.
  const double xmax = 4.0 * n + 6.0;
  const int m = 40 * n;
  std::vector<double> mesh(m + 1);
  for (int j = 0; j <= m; ++j) {
    const double t = static_cast<double>(j) / m;
    mesh[j] = xmax * t * t;
  }
  mesh[0] = 1e-12;  // p_n(0) != 0, avoids a spurious boundary node
  return rule_from_recurrence(rec, n, mesh, "laguerre");
}

GaussRule gauss_hermite(int n) {
  check_n(n);
  // Memoized: value-function evaluation builds a rule per call, so the
  // root finding must not be paid each time.
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  const std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    Recurrence rec{
        [](int) { return 0.0; },
        [](int k) { return std::sqrt(0.5 * k); },
        std::sqrt(M_PI)};
    const double r = std::sqrt(2.0 * n + 1.0) + 2.0;
    it = cache
             .emplace(n, rule_from_recurrence(rec, n,
                                              linear_mesh(-r, r, 10 * n + 10),
                                              "hermite"))
             .first;
  }
  return it->second;
}

}  // namespace restop
