#include "restop/comparator.hpp"

#include <cmath>
#include <sstream>

#include "restop/errors.hpp"
#include "restop/log.hpp"

namespace restop {

double payoff_A(const Model& model, double z) {
  if (z < 0.0) throw DomainError("payoff_A needs z >= 0");
  const double m0 = model.m0();
  return model.params().p * (m0 + model.m1() * z) +
         (1.0 - model.params().p) * model.lit() * m0;
}

double payoff_A_slope(const Model& model) {
  return model.params().p * model.m1();
}

ComparatorResult solve_comparator(const Model& model,
                                  const SolverOptions& options) {
  const double lit = model.lit();
  const double pa1 = payoff_A_slope(model);
  const double pa0 = payoff_A(model, 0.0);
  ComparatorResult res(model, pa0, pa1);

  if (pa0 >= lit) {
    // A >= lit everywhere and A is strictly supermartingale under the
    // discounted dynamics, so attempting immediately is optimal.
    res.closed_form = true;
    return res;
  }

  res.z0_hat = (lit - pa0) / pa1;
  const Obstacle obstacle{[&, pa0, pa1](double z) { return pa0 + pa1 * z; },
                          [pa1](double) { return pa1; }};
  const BoundaryCandidate cand = solve_boundaries(
      model, obstacle, res.z0_hat, options.zmin, options.zmax);
  res.a_hat = cand.a;
  res.b_hat = cand.b;
  res.C1 = cand.C1;
  res.C2 = cand.C2;
  return res;
}

double ComparatorResult::eval(double z) const {
  if (!(z > 0.0)) throw DomainError("eval needs z > 0");
  if (closed_form) return a0 + a1 * z;
  if (z <= a_hat) return model.lit();
  if (z < b_hat) {
    const BoundaryCandidate cand{a_hat, b_hat, C1, C2};
    return basis_value(model, cand, z);
  }
  return a0 + a1 * z;
}

double ComparatorResult::eval_prime(double z) const {
  if (!(z > 0.0)) throw DomainError("eval_prime needs z > 0");
  if (closed_form) return a1;
  if (z <= a_hat) return 0.0;
  if (z < b_hat) {
    const BoundaryCandidate cand{a_hat, b_hat, C1, C2};
    return basis_slope(model, cand, z);
  }
  return a1;
}

OrderingReport ordering_report(const SolveResult& recursive,
                               const ComparatorResult& oneoff) {
  OrderingReport rep;
  rep.a_gap = oneoff.a_hat - recursive.a_star;
  rep.b_gap = oneoff.b_hat - recursive.b_star;
  rep.z0_gap = oneoff.z0_hat - recursive.z0;
  rep.b_gap_asserted = recursive.model.consts().disc == 0.0;

  const double lit = recursive.model.lit();
  const LogGrid& grid = recursive.u.grid();
  rep.nodes_checked = grid.size();

  double max_gap = -1e300;
  int bad_value = -1, bad_lit = -1;
  for (int i = 0; i < grid.size(); ++i) {
    const double z = grid.z(i);
    const double ur = recursive.eval(z);
    const double uo = oneoff.eval(z);
    const double scale = 1.0 + z;
    max_gap = std::max(max_gap, (uo - ur) / scale);
    if (uo > ur + 1e-8 * scale && bad_value < 0) bad_value = i;
    // Lit-region inclusion: u stuck at lit must imply u_hat stuck at lit.
    if (ur <= lit + 1e-7 * scale && uo > lit + 1e-7 * scale && bad_lit < 0)
      bad_lit = i;
  }
  rep.max_value_gap = max_gap;

  std::ostringstream why;
  if (rep.a_gap < -1e-7)
    why << "a_hat < a_star by " << -rep.a_gap << "; ";
  if (rep.z0_gap < -1e-7)
    why << "z0_hat < z0 by " << -rep.z0_gap << "; ";
  if (rep.b_gap_asserted && rep.b_gap < -1e-7)
    why << "b_hat < b_star by " << -rep.b_gap << "; ";
  if (bad_value >= 0)
    why << "u_hat exceeds u at node " << bad_value << " (z = "
        << grid.z(bad_value) << "); ";
  if (bad_lit >= 0)
    why << "u at lit payoff but u_hat above it at node " << bad_lit
        << " (z = " << grid.z(bad_lit) << "); ";
  const std::string msg = why.str();
  if (!msg.empty()) throw OrderingViolation("ordering_report: " + msg);
  return rep;
}

double premium(const SolveResult& recursive, const ComparatorResult& oneoff,
               double s, double k) {
  if (!(s > 0.0) || !(k > 0.0))
    throw DomainError("premium needs s > 0 and k > 0");
  const double z = k / s;
  return s * (recursive.eval(z) - oneoff.eval(z));
}

}  // namespace restop
