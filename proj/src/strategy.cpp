#include "restop/strategy.hpp"

#include <cstddef>
#include <sstream>

#include "restop/errors.hpp"
#include "restop/format.hpp"

namespace restop {

const char* region_name(Region r) {
  switch (r) {
    case Region::SellLit:
      return "SELL_LIT";
    case Region::Continue:
      return "CONTINUE";
    case Region::SellDark:
      return "SELL_DARK";
  }
  return "UNKNOWN";
}

Region classify(const TradingRule& rule, double s, double k) {
  if (!(s > 0.0) || !(k > 0.0))
    throw DomainError("classify needs s > 0 and k > 0");
  const double z = k / s;
  if (z <= rule.a_star) return Region::SellLit;
  if (z >= rule.b_star) return Region::SellDark;
  return Region::Continue;
}

double value2d(const SolveResult& result, double s, double k) {
  if (!(s > 0.0) || !(k > 0.0))
    throw DomainError("value2d needs s > 0 and k > 0");
  return s * result.eval(k / s);
}

std::string region_wedge_csv(const TradingRule& rule, double s_max,
                             int n_points,
                             const std::vector<std::pair<double, double>>*
                                 overlay_path) {
  if (!(s_max > 0.0) || n_points < 2)
    throw DomainError("region_wedge_csv needs s_max > 0 and n_points >= 2");
  std::ostringstream out;
  out << "s,k_lower_ray,k_upper_ray";
  const bool overlay = overlay_path != nullptr && !overlay_path->empty();
  if (overlay) out << ",path_s,path_k,action";
  out << "\n";

  const std::size_t n_overlay = overlay ? overlay_path->size() : 0;
  const std::size_t rows =
      std::max(static_cast<std::size_t>(n_points), n_overlay);
  for (std::size_t i = 0; i < rows; ++i) {
    if (i < static_cast<std::size_t>(n_points)) {
      const double s = s_max * static_cast<double>(i) /
                       static_cast<double>(n_points - 1);
      out << g17(s) << ',' << g17(rule.a_star * s) << ','
          << g17(rule.b_star * s);
    } else {
      out << ",,";
    }
    if (overlay) {
      if (i < n_overlay) {
        const auto& [ps, pk] = (*overlay_path)[i];
        out << ',' << g17(ps) << ',' << g17(pk) << ','
            << region_name(classify(rule, ps, pk));
      } else {
        out << ",,,";
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace restop
