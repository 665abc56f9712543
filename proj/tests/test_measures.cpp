#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fwlab/error.hpp"
#include "fwlab/measures.hpp"

using namespace fwlab;

namespace {

// Exhaustive oracle: every atom-centred ball at every probed radius.
double brute_frostman(const AtomicMeasure& mu, double alpha, const std::vector<double>& radii) {
  double best = 0.0;
  for (double r : radii)
    for (std::size_t j = 0; j < mu.size(); ++j) best = std::max(best, ball_mass(mu, mu.point(j), r) / std::pow(r, alpha));
  return best;
}

AtomicMeasure random_cloud(std::mt19937_64& rng, int n, int count) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> pts(static_cast<std::size_t>(n) * count), w(count);
  for (double& x : pts) x = u(rng);
  for (double& x : w) x = u(rng);
  return AtomicMeasure(n, pts, w);
}

}  // namespace

TEST_CASE("cantor product construction") {
  const auto half = build_cantor_product(0.5, 1, 1);
  REQUIRE(half.size() == 2);
  CHECK(half.point(0)[0] == doctest::Approx(0.25));
  CHECK(half.point(1)[0] == doctest::Approx(0.75));
  CHECK(half.weight(0) == 0.5);
  CHECK(cantor_dimension(0.5, 1) == doctest::Approx(1.0));

  const auto c = build_cantor_product(1.0 / 3.0, 8, 2);
  CHECK(c.size() == 65536u);  // 2^(8*2)
  CHECK(c.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cantor_dimension(1.0 / 3.0, 2) == doctest::Approx(2.0 * std::log(2.0) / std::log(3.0)));
  CHECK(cantor_dimension(1.0 / 3.0, 2) == doctest::Approx(1.2619).epsilon(1e-4));
  CHECK(cantor_dimension(0.25, 2) == doctest::Approx(1.0).epsilon(1e-15));

  const auto w = c.weights();
  CHECK(std::all_of(w.begin(), w.end(), [&](double x) { return x == w.front(); }));

  CHECK_THROWS_AS(build_cantor_product(0.6, 2, 1), ParameterError);
  CHECK_THROWS_AS(build_cantor_product(0.0, 2, 1), ParameterError);
  CHECK_THROWS_AS(build_cantor_product(0.3, 13, 2), ResourceError);
}

TEST_CASE("falconer lattice") {
  const auto m = build_falconer_lattice(2, 1.0, 2);
  CHECK(m.size() == 9u);
  CHECK(m.weight(0) == doctest::Approx(1.0 / 9.0));
  CHECK(falconer_radius(2, 1.0, 2) == doctest::Approx(0.25));
  CHECK(build_falconer_lattice(16, 1.0, 2).size() == 289u);
  CHECK(falconer_radius(16, 1.0, 2) == doctest::Approx(std::pow(16.0, -2.0)));
  CHECK(build_falconer_lattice(8, 1.5, 3).size() == 729u);
  CHECK(falconer_radius(8, 1.5, 3) == doctest::Approx(1.0 / 64.0));
  CHECK_THROWS_AS(build_falconer_lattice(8, 2.0, 2), ParameterError);
  CHECK_THROWS_AS(build_falconer_lattice(1, 1.0, 2), ParameterError);
}

TEST_CASE("sphere measures") {
  const double pi = std::numbers::pi;
  const auto s = build_sphere_measure(1.0, 2, 360);
  CHECK(s.size() == 360u);
  CHECK(std::abs(s.total_mass() - 2.0 * pi) / (2.0 * pi) < 1e-12);
  CHECK(s.is_even());
  CHECK(std::abs(build_sphere_measure(2.0, 2, 360).total_mass() - 4.0 * pi) < 1e-10 * 4.0 * pi);

  const auto s3 = build_sphere_measure(1.0, 3, 1000);
  CHECK(std::abs(s3.total_mass() - 4.0 * pi) < 1e-3 * 4.0 * pi);
  double lin = 0.0, sq = 0.0;
  for (std::size_t j = 0; j < s3.size(); ++j) {
    lin += s3.weight(j) * s3.point(j)[2];
    sq += s3.weight(j) * s3.point(j)[2] * s3.point(j)[2];
  }
  CHECK(std::abs(lin) < 1e-2);
  // Exact integral of x3^2 over S^2 is 4 pi / 3.
  CHECK(sq == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-2));
  CHECK_THROWS_AS(build_sphere_measure(1.0, 4, 100), ParameterError);
}

TEST_CASE("frostman audit") {
  SUBCASE("single atom diverges at the floor") {
    const AtomicMeasure atom(2, {0.3, 0.4}, {1.0});
    const auto rep = frostman_constant(atom, 1.0, 1.0 / 64.0);
    CHECK(rep.constant_estimate == doctest::Approx(64.0));
    CHECK(rep.attained_at_floor);
  }
  SUBCASE("uniform square at alpha 2") {
    const auto grid = build_uniform_grid(256, 2);
    const auto rep = frostman_constant(grid, 2.0, 1.0 / 32.0);
    CHECK(rep.constant_estimate <= 4.0);
    CHECK(rep.constant_estimate > 2.5);
    CHECK_FALSE(rep.attained_at_floor);
  }
  SUBCASE("cantor set is scale stable") {
    const auto c = build_cantor_product(1.0 / 3.0, 8, 1);
    const double alpha = std::log(2.0) / std::log(3.0);
    std::vector<double> est;
    for (int j = 4; j <= 7; ++j) est.push_back(frostman_constant(c, alpha, std::pow(3.0, -j)).constant_estimate);
    const auto [lo, hi] = std::minmax_element(est.begin(), est.end());
    CHECK(*hi / *lo <= 2.0);
  }
  SUBCASE("cell index agrees with the exhaustive oracle") {
    std::mt19937_64 rng(7);
    for (int n = 1; n <= 3; ++n) {
      const auto mu = random_cloud(rng, n, 300);
      const auto rep = frostman_constant(mu, 0.8 * n, 0.01);
      double brute = brute_frostman(mu, 0.8 * n, rep.scales_probed);
      // Smallest centroid ball holding all the mass.
      std::vector<double> c(n, 0.0);
      for (std::size_t j = 0; j < mu.size(); ++j)
        for (int a = 0; a < n; ++a) c[a] += mu.weight(j) * mu.point(j)[a] / mu.total_mass();
      double far = 0.0;
      for (std::size_t j = 0; j < mu.size(); ++j) {
        double d = 0.0;
        for (int a = 0; a < n; ++a) d += (mu.point(j)[a] - c[a]) * (mu.point(j)[a] - c[a]);
        far = std::max(far, std::sqrt(d));
      }
      brute = std::max(brute, mu.total_mass() / std::pow(far, 0.8 * n));
      CHECK(rep.constant_estimate == doctest::Approx(brute).epsilon(1e-12));
    }
  }
  SUBCASE("monotone in alpha for sub-unit radii") {
    const auto c = build_cantor_product(0.25, 5, 2);
    const auto lo = frostman_constant(translate(c, std::vector<double>{0.0, 0.0}), 0.8, 1.0 / 512);
    const AtomicMeasure small(2, c.positions(), c.weights(), false, 0.9);
    const double a1 = frostman_constant(small, 0.8, 1.0 / 512).constant_estimate;
    const double a2 = frostman_constant(small, 1.2, 1.0 / 512).constant_estimate;
    CHECK(a2 >= a1);
    CHECK(lo.constant_estimate > 0.0);
  }
  CHECK_THROWS_AS(frostman_constant(AtomicMeasure(), 1.0, 0.1), DomainError);
}

TEST_CASE("evenize") {
  const AtomicMeasure atom(2, {1.5, 0.5}, {1.0});
  const auto e = evenize(atom);
  REQUIRE(e.size() == 2u);
  CHECK(e.is_even());
  CHECK(e.total_mass() == 2.0);
  CHECK(e.point(1)[0] == -1.5);
  CHECK(e.point(1)[1] == -0.5);

  const auto ee = evenize(e);
  CHECK(ee.size() == 4u);
  CHECK(ee.total_mass() == 4.0);

  // Lattice moved beyond distance one from the origin: small balls meet one copy.
  const auto lat = build_falconer_lattice(8, 1.0, 2);
  const auto moved = translate(lat, std::vector<double>{1.5, 1.5});
  const auto even = evenize(moved);
  std::vector<double> radii;
  for (double r = 0.9; r >= 1.0 / 64; r /= 2) radii.push_back(r);
  const double base = brute_frostman(moved, 1.0, radii);
  const double ext = brute_frostman(even, 1.0, radii);
  CHECK(ext >= base * (1.0 - 1e-12));
  CHECK(ext <= 2.0 * base);
}

TEST_CASE("product with time") {
  const AtomicMeasure atom(2, {0.2, 0.1}, {1.0});
  const auto d = product_with_time(atom, DiracTime{0.0});
  REQUIRE(d.size() == 1u);
  CHECK(d.point(0)[2] == 0.0);

  const auto c = build_cantor_product(0.25, 3, 2);
  const auto g = product_with_time(c, UniformTimeGrid{4});
  CHECK(g.size() == 4 * c.size());
  CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-14));

  // Balls in R^{n+1} centred on the slice restrict to spatial balls.
  const auto lifted = product_with_time(c, DiracTime{0.0}).as_atomic();
  const double spatial = frostman_constant(c, 1.0, 1.0 / 128).constant_estimate;
  const double spacetime =
      frostman_constant(AtomicMeasure(3, lifted.positions(), lifted.weights(), false, c.diameter_hint()), 1.0, 1.0 / 128)
          .constant_estimate;
  CHECK(spacetime == doctest::Approx(spatial).epsilon(1e-12));
}
