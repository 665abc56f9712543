#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "fwlab/conditions.hpp"
#include "fwlab/error.hpp"

using namespace fwlab;

namespace {
// Branch values written out separately, evaluated at a seam from each side.
double branch_low(double a, double p, int n) { return std::max(n / 2.0 - a / p, (n + 1) / 4.0); }
double branch_mid(double a, double p, int n) {
  return std::max({n / 2.0 - a / p, (n + 1) / 4.0 - (a - 1) / (2 * p), (n + 2) / 4.0 - a / 4});
}
double branch_high(double a, double p, int n) {
  return std::max({n / 2.0 - a / p, (n + 1) / 4.0 - (2 * a - (n + 1)) / (2 * p), (n + 1) / 2.0 - a / 2});
}
}  // namespace

TEST_CASE("s_necessary values and seams") {
  CHECK(s_necessary(1.0, 2.0, 2) == doctest::Approx(0.75));
  CHECK(s_necessary(4.0, 2.0, 3) == doctest::Approx(0.0));
  for (int n = 2; n <= 6; ++n)
    for (double p : {1.0, 1.5, 2.0, 3.0, 7.0}) {
      CHECK(branch_low(1.0, p, n) == doctest::Approx(branch_mid(1.0, p, n)).epsilon(1e-14));
      CHECK(branch_mid(n, p, n) == doctest::Approx(branch_high(n, p, n)).epsilon(1e-14));
      CHECK(s_necessary(1.0, p, n) == doctest::Approx(branch_low(1.0, p, n)));
      CHECK(s_necessary(n, p, n) == doctest::Approx(branch_high(n, p, n)));
      CHECK(s_necessary(0.5, p, n) == doctest::Approx(branch_low(0.5, p, n)));
      CHECK(s_necessary(n - 0.5, p, n) == doctest::Approx(branch_mid(n - 0.5, p, n)));
      CHECK(s_necessary(n + 0.5, p, n) == doctest::Approx(branch_high(n + 0.5, p, n)));
    }
  CHECK_THROWS_AS(s_necessary(0.0, 2.0, 2), RangeError);
  CHECK_THROWS_AS(s_necessary(3.5, 2.0, 2), RangeError);
  CHECK_THROWS_AS(s_necessary(1.0, 0.5, 2), RangeError);
  CHECK_THROWS_AS(s_necessary(1.0, 2.0, 1), RangeError);
}

TEST_CASE("s_necessary is continuous in alpha and nondecreasing in p") {
  for (int n = 2; n <= 4; ++n) {
    const double step = 1e-4;
    double prev = s_necessary(step, 2.0, n);
    for (double a = 2 * step; a <= n + 1; a += step) {
      const double v = s_necessary(a, 2.0, n);
      CHECK(std::abs(v - prev) < 2 * step);
      prev = v;
    }
    for (double a = 0.25; a <= n + 1; a += 0.25) {
      double last = s_necessary(a, 1.0, n);
      for (double p = 1.25; p <= 8.0; p += 0.25) {
        const double v = s_necessary(a, p, n);
        CHECK(v >= last - 1e-15);
        last = v;
      }
    }
  }
}

TEST_CASE("sufficient_s") {
  CHECK(*sufficient_s(1.0, 1.5, 2) == doctest::Approx(0.75));
  CHECK(*sufficient_s(2.0, 3.0, 2) == doctest::Approx(s_necessary(2.0, 3.0, 2)));
  for (double a = 0.1; a <= 3.0; a += 0.1)
    CHECK(*sufficient_s(a, 2.0, 3) == doctest::Approx(*sufficient_s(a, 2.0 - 1e-12, 3)));
  CHECK_FALSE(sufficient_s(1.0, 2.0, 4).has_value());
}

TEST_CASE("new necessary condition region") {
  // Brute-force oracle: scan alpha for (n-2)/4 > new_necessary.
  auto scan = [](double p, int n) {
    int hits = 0;
    for (double a = 1e-3; a < n / 2.0; a += 1e-3) hits += (n - 2) / 4.0 > new_necessary(a, p, n);
    return hits;
  };
  const std::vector<std::pair<int, double>> cutoffs{{2, 4.0 / 3}, {3, 8.0 / 5}, {4, 2.0}};
  for (const auto& [n, pc] : cutoffs) {
    CHECK(new_condition_region(pc, n).empty);
    CHECK_FALSE(new_condition_region(pc - 1e-9, n).empty);
    if (pc < 2.0) CHECK(new_condition_region(pc + 1e-9, n).empty);
    for (double p = 1.0; p <= 2.0; p += 0.05) {
      const AlphaInterval r = new_condition_region(p, n);
      CHECK(r.empty == (p >= pc));
      CHECK(r.empty == (scan(p, n) == 0));
    }
  }
  const AlphaInterval r = new_condition_region(1.9, 4);
  CHECK_FALSE(r.empty);
  CHECK(r.hi == 2.0);
  CHECK(r.lo == doctest::Approx(std::max(3.0 - 2.0 / 1.9, 4.0 - 4.0 / 1.9)));
  for (double a = r.lo + 1e-6; a < r.hi; a += 0.01) CHECK(0.5 > new_necessary(a, 1.9, 4));
  CHECK(new_necessary(r.lo, 1.9, 4) == doctest::Approx(0.5));
  CHECK_THROWS_AS(new_condition_region(2.5, 3), RangeError);
}

TEST_CASE("gamma lower bound table") {
  const GammaBound m = gamma_lower_bound(1.0, 3);
  CHECK(m.value == 0.5);
  CHECK(m.source == "Mattila");
  CHECK(0.5 - (2.0 * 2 - 4 + 1) / 4 == doctest::Approx(0.25));
  CHECK(0.25 - (2.0 * 2 - 4) / 8 == doctest::Approx(0.25));
  CHECK(gamma_lower_bound(2.0, 4).value == doctest::Approx(0.25));
  for (int n = 2; n <= 6; ++n) {
    const auto rows = gamma_table_rows(n / 2.0, n);
    REQUIRE(rows.size() == 3);
    CHECK(std::abs(rows[0].value - rows[1].value) < 1e-15);
  }
  CHECK(gamma_table_rows(0.2, 3).size() == 1);
  for (int n = 2; n <= 5; ++n) {
    CHECK(gamma_lower_bound(n, n).value == 0.0);
    if (n > 2) CHECK(gamma_lower_bound(n, n).source == "Luca-Rogers");
    double prev = gamma_lower_bound(1e-3, n).value;
    double prev_shift = prev + 1e-3 / 2;
    for (int i = 2; i <= 1000 * n; ++i) {
      const double a = 1e-3 * i;
      const double g = gamma_lower_bound(a, n).value;
      CHECK(g <= prev + 1e-12);
      CHECK(g + a / 2 >= prev_shift - 1e-12);
      prev = g;
      prev_shift = g + a / 2;
    }
  }
  CHECK_THROWS_AS(gamma_lower_bound(0.0, 3), RangeError);
  CHECK_THROWS_AS(gamma_lower_bound(3.1, 3), RangeError);
}

TEST_CASE("implication thresholds") {
  for (int n = 2; n <= 4; ++n)
    for (double a = (n - 1) / 2.0 + 0.01; a < (n + 1) / 2.0; a += 0.01) {
      const double beta = n - a;
      CHECK(mattila_threshold(beta, a, n));
      CHECK(prop_well(beta, a) == doctest::Approx((n + 1) / 2.0 - a));
      CHECK(wells_condition(prop_well(beta, a) + 1e-12, a, n));
    }
  CHECK_FALSE(mattila_threshold(0.9, 1.0, 2));
  CHECK_THROWS_AS(wells_condition(0.5, 2.0, 2), RangeError);
  CHECK(prop_nullform(0.3) == 0.3);
  CHECK(prop_nullform(0.8) == 0.5);
  for (int n = 2; n <= 5; ++n) CHECK(liu_pinned((n + 1) / 2.0, n) == doctest::Approx(n / 2.0));
  CHECK_THROWS_AS(liu_pinned(0.9, 2), RangeError);

  std::vector<std::pair<double, double>> curve;
  const double step = 1e-3;
  for (int i = 1; i <= 3000; ++i) curve.emplace_back(i * step, gamma_lower_bound(i * step, 3).value);
  const auto th = falconer_threshold_from_gamma(curve, 3);
  REQUIRE(th.has_value());
  CHECK(std::abs(*th - (1.5 + 1.0 / 3)) <= step);
  const std::vector<std::pair<double, double>> none{{0.5, 0.0}};
  CHECK_FALSE(falconer_threshold_from_gamma(none, 3).has_value());
}
