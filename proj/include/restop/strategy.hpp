#pragma once

#include <string>
#include <utility>
#include <vector>

#include "restop/fixedpoint.hpp"

namespace restop {

// Stopping rule in the size ratio z = k/s: sell lit at or below a_star,
// sell dark at or above b_star, wait in between.
struct TradingRule {
  double a_star = 0.0;
  double b_star = 0.0;
};

enum class Region { SellLit, Continue, SellDark };

const char* region_name(Region r);

// Action for a parent order of size s with dark-pool candidate size k.
// Boundary values stop (the stopping set is closed).
Region classify(const TradingRule& rule, double s, double k);

// Value in original coordinates: v(s, k) = s * u(k / s).
double value2d(const SolveResult& result, double s, double k);

// CSV with the two boundary rays k = a_star * s and k = b_star * s over
// s in [0, s_max]; optionally overlays a simulated (s, k) path with the
// action taken at each point. Short sides are padded with empty fields.
std::string region_wedge_csv(const TradingRule& rule, double s_max,
                             int n_points,
                             const std::vector<std::pair<double, double>>*
                                 overlay_path = nullptr);

}  // namespace restop
