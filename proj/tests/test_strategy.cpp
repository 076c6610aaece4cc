#include <doctest.h>

#include <cstring>
#include <sstream>
#include <string>

#include "restop/errors.hpp"
#include "restop/fixedpoint.hpp"
#include "restop/strategy.hpp"
#include "helpers.hpp"

using restop::Region;
using restop::TradingRule;

TEST_CASE("classification follows the wedge") {
  const TradingRule rule{0.09, 0.10};
  // z = k/s against [0.09, 0.10].
  CHECK(restop::classify(rule, 1.0, 0.05) == Region::SellLit);
  CHECK(restop::classify(rule, 1.0, 0.095) == Region::Continue);
  CHECK(restop::classify(rule, 1.0, 0.2) == Region::SellDark);
  // Scale invariance: only the ratio matters.
  CHECK(restop::classify(rule, 200.0, 10.0) == Region::SellLit);
  CHECK(restop::classify(rule, 200.0, 19.0) == Region::Continue);
  CHECK(restop::classify(rule, 200.0, 40.0) == Region::SellDark);
}

TEST_CASE("boundaries belong to the stopping regions") {
  const TradingRule rule{0.09, 0.10};
  CHECK(restop::classify(rule, 1.0, 0.09) == Region::SellLit);
  CHECK(restop::classify(rule, 1.0, 0.10) == Region::SellDark);
}

TEST_CASE("degenerate rules") {
  // a == b: the continuation region is empty.
  const TradingRule touching{0.1, 0.1};
  CHECK(restop::classify(touching, 1.0, 0.0999) == Region::SellLit);
  CHECK(restop::classify(touching, 1.0, 0.1001) == Region::SellDark);
  // Closed-form solutions use a = b = 0: dark everywhere.
  const TradingRule dark_everywhere{0.0, 0.0};
  CHECK(restop::classify(dark_everywhere, 1.0, 1e-9) == Region::SellDark);
  CHECK(restop::classify(dark_everywhere, 5.0, 100.0) == Region::SellDark);
  // Overlapping stop regions (a > b): lit wins at or below a.
  const TradingRule overlap{0.11, 0.09};
  CHECK(restop::classify(overlap, 1.0, 0.10) == Region::SellLit);
  CHECK(restop::classify(overlap, 1.0, 0.12) == Region::SellDark);
}

TEST_CASE("classification validates its inputs") {
  const TradingRule rule{0.09, 0.10};
  CHECK_THROWS_AS(restop::classify(rule, 0.0, 0.1), restop::DomainError);
  CHECK_THROWS_AS(restop::classify(rule, 1.0, 0.0), restop::DomainError);
  CHECK_THROWS_AS(restop::classify(rule, -1.0, 0.1), restop::DomainError);
}

TEST_CASE("region names match the CLI vocabulary") {
  CHECK(std::strcmp(restop::region_name(Region::SellLit), "SELL_LIT") == 0);
  CHECK(std::strcmp(restop::region_name(Region::Continue), "CONTINUE") == 0);
  CHECK(std::strcmp(restop::region_name(Region::SellDark), "SELL_DARK") == 0);
}

TEST_CASE("two-dimensional value is homogeneous of degree one") {
  const restop::SolveResult res = restop::solve(
      testutil::reference_model(), [] {
        restop::SolverOptions o;
        o.grid_n = 500;
        o.fp_tol = 1e-8;
        return o;
      }());
  for (double s : {0.5, 1.0, 7.0}) {
    for (double k : {0.01, 0.09, 2.0}) {
      const double base = restop::value2d(res, s, k);
      for (double lam : {0.5, 2.0, 10.0}) {
        const double scaled = restop::value2d(res, lam * s, lam * k);
        CHECK(std::abs(scaled - lam * base) <= 1e-12 * (1.0 + lam * (s + k)));
      }
    }
  }
  // v(s, k) >= gamma * s (lit sale is always available).
  CHECK(restop::value2d(res, 2.0, 0.01) >= 2.0 * res.model.lit() - 1e-12);
  CHECK_THROWS_AS(restop::value2d(res, 0.0, 1.0), restop::DomainError);
}

TEST_CASE("wedge csv carries the boundary rays") {
  const TradingRule rule{0.09, 0.10};
  const std::string csv = restop::region_wedge_csv(rule, 10.0, 11);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "s,k_lower_ray,k_upper_ray");
  int rows = 0;
  double last_s = -1.0, last_lo = 0.0, last_hi = 0.0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string f;
    REQUIRE(std::getline(fields, f, ','));
    last_s = std::stod(f);
    REQUIRE(std::getline(fields, f, ','));
    last_lo = std::stod(f);
    REQUIRE(std::getline(fields, f, ','));
    last_hi = std::stod(f);
    CHECK(last_lo == doctest::Approx(0.09 * last_s).epsilon(1e-12));
    CHECK(last_hi == doctest::Approx(0.10 * last_s).epsilon(1e-12));
  }
  CHECK(rows == 11);
  CHECK(last_s == doctest::Approx(10.0));
  CHECK(last_lo < last_hi);
}

TEST_CASE("wedge csv overlays a path with actions") {
  const TradingRule rule{0.09, 0.10};
  const std::vector<std::pair<double, double>> path = {
      {1.0, 0.095}, {1.1, 0.05}, {0.9, 0.10}};
  const std::string csv = restop::region_wedge_csv(rule, 2.0, 2, &path);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "s,k_lower_ray,k_upper_ray,path_s,path_k,action");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  // Row count is max(ray points, path points) with the short side padded.
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].find("CONTINUE") != std::string::npos);
  CHECK(rows[1].find("SELL_LIT") != std::string::npos);
  CHECK(rows[2].find("SELL_DARK") != std::string::npos);
  // The third row has exhausted the 2-point rays: ray fields are empty.
  CHECK(rows[2].substr(0, 3) == ",,,");
}

TEST_CASE("wedge csv validates inputs") {
  const TradingRule rule{0.09, 0.10};
  CHECK_THROWS_AS(restop::region_wedge_csv(rule, 0.0, 10), restop::DomainError);
  CHECK_THROWS_AS(restop::region_wedge_csv(rule, 1.0, 1), restop::DomainError);
}
