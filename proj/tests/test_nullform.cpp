#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fwlab/error.hpp"
#include "fwlab/nullform.hpp"
#include "fwlab/wave.hpp"

using namespace fwlab;

namespace {
constexpr double kPi = std::numbers::pi;

GridField random_band(const GridSpec& g, double rmax, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  GridField c(g, FieldDomain::frequency);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (frequency_modulus(g, i) <= rmax) c[i] = {nd(rng), nd(rng)};
  return to_space(c);
}

GridField cos_mode(const GridSpec& g, std::span<const int> m, double phase = 0.0) {
  GridField f(g, FieldDomain::space);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double th = phase;
    for (int a = 0; a < g.n; ++a) th += 2.0 * kPi * m[a] * f.signed_index(i, a) / g.N;
    f[i] = {std::cos(th), 0.0};
  }
  return f;
}
}  // namespace

TEST_CASE("null energy of a single mode") {
  const GridSpec g{2, 32, 4.0};
  const std::vector<int> m{3, -2};
  const double omega = 2.0 * kPi * std::hypot(3.0, 2.0) / g.L;
  const GridField e = null_energy(cos_mode(g, m), 0.37);
  double worst = 0.0;
  const GridField ref = cos_mode(g, std::vector<int>{6, -4});
  for (std::size_t i = 0; i < e.size(); ++i) worst = std::max(worst, std::abs(e[i].real() - omega * omega * ref[i].real()));
  CHECK(worst < 1e-10 * omega * omega);
  CHECK(std::abs(integral(e).real()) < 1e-10 * omega * omega);

  // A complex exponential has |d_t u| = |grad u| pointwise.
  GridField c(g, FieldDomain::frequency);
  c[5 * g.N + 2] = {1.0, 0.0};
  CHECK(sup_norm(null_energy(to_space(c), 0.8)) < 1e-10);
}

TEST_CASE("null-form identity on random band-limited data") {
  const GridSpec g{2, 256, 8.0};
  for (unsigned seed = 0; seed < 4; ++seed) {
    const GridField u0 = random_band(g, 7.0, seed);
    const NullIdentityReport r = null_identity_check(u0, 0.25 + 0.1 * seed);
    CHECK(r.relative < 1e-6);
    CHECK(r.mean_relative < 1e-10);
    CHECK(r.dt <= std::ldexp(1.0, -3 - 3));
  }
  CHECK_THROWS_AS(null_identity_check(random_band(GridSpec{2, 32, 1.0}, 10.0, 1), 0.0), ParameterError);
}

TEST_CASE("inverse-Laplacian weight against the periodic Newton kernel") {
  // Torus Green's function with neutralizing background on the cubic lattice:
  // 1/(4 pi r) + r^2/(6 L^3) - 2.837297/(4 pi L) + O(r^4/L^5).
  const GridSpec g{3, 64, 4.0};
  const AtomicMeasure atom(3, {0.0, 0.0, 0.0}, {1.0});
  const InverseLaplacianWeight w = inverse_laplacian_weight(atom, g);
  CHECK(w.projected_mean == doctest::Approx(1.0).epsilon(1e-10));
  std::vector<double> pts;
  for (double r : {0.25, 0.35, 0.5, 0.75, 1.0}) {
    pts.insert(pts.end(), {r, 0.0, 0.0});
    pts.insert(pts.end(), {0.6 * r, 0.0, 0.8 * r});
  }
  const auto v = evaluate_at(w.field, pts);
  const auto k = riesz_kernel_sum(atom, pts, 1.0);
  for (std::size_t p = 0; p < k.size(); ++p) {
    const double r = 1.0 / k[p];
    CHECK(r >= 4 * g.spacing() - 1e-12);
    const double ref = newton_constant(3) * k[p] + r * r / (6.0 * std::pow(g.L, 3)) - 2.837297 / (4.0 * kPi * g.L);
    CHECK(std::abs(v[p].real() - ref) < 0.05 * ref);
  }
  CHECK(newton_constant(3) == doctest::Approx(1.0 / (4.0 * kPi)));
  CHECK_THROWS_AS(newton_constant(2), ParameterError);
}

TEST_CASE("inverse-Laplacian weight boundedness under refinement") {
  const AtomicMeasure atom(3, {0.0, 0.0, 0.0}, {1.0});
  const WeightRefinement point = weight_refinement(atom, GridSpec{3, 16, 4.0}, 3);
  CHECK(point.unbounded);
  CHECK(point.growth > 3.0);
  const WeightRefinement solid = weight_refinement(build_uniform_grid(16, 3), GridSpec{3, 16, 8.0}, 3);
  CHECK_FALSE(solid.unbounded);
  CHECK(solid.growth < 1.25);

  // Equal masses on every grid node: the mollified measure is constant.
  const GridSpec g{2, 16, 4.0};
  std::vector<double> x;
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) x.insert(x.end(), {i * g.spacing(), j * g.spacing()});
  const AtomicMeasure flat(2, x, std::vector<double>(g.N * g.N, 1.0));
  const InverseLaplacianWeight w = inverse_laplacian_weight(flat, g);
  CHECK(sup_norm(w.field) < 1e-12 * w.projected_mean);
  CHECK(w.projected_mean == doctest::Approx(g.N * g.N));
}

TEST_CASE("gamma* functional") {
  const GridSpec g{2, 64, 4.0};
  const AtomicMeasure mu = evenize(translate(build_cantor_product(0.25, 3, 2), std::vector<double>{-0.5, -0.5}));
  const InverseLaplacianWeight w = inverse_laplacian_weight(mu, g);
  const GridField mu_R = mollify_measure(mu, w.cutoff, g);
  const GridField u0 = random_band(g, 3.0, 7);

  InverseLaplacianWeight flat = w;
  for (auto& v : flat.field.values()) v = {2.5, 0.0};
  flat.projected_mean = 0.0;
  const GammaStarValue zero = gamma_star_functional(u0, flat, mu_R, 1.0, 0.0, 9);
  const double scale = 2.5 * std::pow(sobolev_norm(u0, 1.0), 2);
  CHECK(std::abs(zero.functional) < 1e-12 * scale);

  // One real mode: N = omega^2 cos(2 theta), constant in t, so the functional is
  // omega^2 L^n Re c_W(2 m).
  const std::vector<int> m{2, 1};
  const double omega = 2.0 * kPi * std::hypot(2.0, 1.0) / g.L;
  const GammaStarValue one = gamma_star_functional(cos_mode(g, m), w, mu_R, 1.0, 0.0, 5);
  const GridField cw = to_frequency(w.field);
  const cplx c2m = cw[4 * g.N + 2];
  CHECK(std::abs(one.functional - omega * omega * g.L * g.L * c2m.real()) < 1e-8 * std::max(1.0, std::abs(one.functional)));

  // The integrand is signed: some two-mode datum with opposed phases goes negative.
  double most_negative = 0.0;
  for (int a = 1; a <= 4 && most_negative >= 0.0; ++a)
    for (int b = 0; b <= 3; ++b) {
      GridField two = cos_mode(g, std::vector<int>{a, b});
      const GridField other = cos_mode(g, std::vector<int>{b, a + 1}, kPi);
      for (std::size_t i = 0; i < two.size(); ++i) two[i] += other[i];
      most_negative = std::min(most_negative, gamma_star_functional(two, w, mu_R, 1.0, 0.0, 33).functional);
    }
  CHECK(most_negative < 0.0);

  const GammaStarValue chain = gamma_star_functional(u0, w, mu_R, 1.0, 0.0, 257);
  CHECK(chain.chain_residual < 1e-3);
  CHECK(std::isfinite(chain.ratio));
}

TEST_CASE("estimate_gamma_star outside the proposition's range") {
  const GridSpec g{2, 128, 4.0};
  const AtomicMeasure mu = evenize(translate(build_cantor_product(0.25, 3, 2), std::vector<double>{-0.5, -0.5}));
  const FrostmanReport fr = frostman_constant(mu, 1.0, 1e-2);
  const GammaStarReport r = estimate_gamma_star(mu, fr, 0, 2, g, 33);
  CHECK_FALSE(r.in_scope);
  CHECK(r.samples.size() == 3);
  CHECK(std::isfinite(r.gamma_star));
  CHECK_THROWS_AS(estimate_gamma_star(mu, fr, 0, 4, g), ParameterError);
}

TEST_CASE("Riesz potential bound") {
  const AtomicMeasure atom(2, {0.5, 0.5}, {1.0});
  const FrostmanReport fa = frostman_constant(atom, 0.5, 1e-3);
  const RieszBoundReport ra = riesz_bound_check(atom, fa, 0.3, GridSpec{2, 32, 8.0});
  CHECK(ra.floor == doctest::Approx(0.25));
  CHECK(ra.sup == doctest::Approx(std::pow(0.25, -0.3)));

  const AtomicMeasure uni = build_uniform_grid(32, 2);
  const FrostmanReport fu = frostman_constant(uni, 2.0, 1.0 / 32);
  const RieszBoundReport ru = riesz_bound_check(uni, fu, 1.0, GridSpec{2, 64, 8.0});
  CHECK(ru.worst_constant <= 8.0);
  CHECK(ru.worst_constant <= ru.dyadic_constant);
  CHECK(ru.far_within_mass);

  const AtomicMeasure cantor = build_cantor_product(0.25, 4, 2);
  const FrostmanReport fc = frostman_constant(cantor, 1.0, 1e-3);
  const double c64 = riesz_bound_check(cantor, fc, 0.8, GridSpec{2, 64, 8.0}).worst_constant;
  const double c128 = riesz_bound_check(cantor, fc, 0.8, GridSpec{2, 128, 8.0}).worst_constant;
  CHECK(std::isfinite(c64));
  CHECK(std::abs(c128 / c64 - 1.0) < 0.2);
  CHECK_THROWS_AS(riesz_bound_check(cantor, fc, 1.0, GridSpec{2, 64, 8.0}), RangeError);
}

TEST_CASE("fractional Leibniz ratio") {
  const GridSpec g{2, 64, 4.0};
  GridField e(g, FieldDomain::frequency);
  e[3 * g.N + 1] = {1.0, 0.0};
  const GridField mode = to_space(e);
  CHECK(fractional_leibniz_check(mode, mode, 1.0).ratio == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fractional_leibniz_check(mode, mode, 0.0).ratio == doctest::Approx(0.5).epsilon(1e-10));

  double worst = 0.0;
  for (unsigned t = 0; t < 100; ++t) {
    const GridField a = random_band(g, 3.0, 1000 + t), b = random_band(g, 3.0, 2000 + t);
    CHECK(fractional_leibniz_check(a, b, 0.0).ratio <= 0.5 + 1e-12);
    for (double s : {0.5, 1.0, 1.5}) worst = std::max(worst, fractional_leibniz_check(a, b, s).ratio);
  }
  CHECK(worst <= 4.0);
  CHECK_THROWS_AS(fractional_leibniz_check(random_band(g, 6.0, 1), random_band(g, 6.0, 2), 1.0), ParameterError);
}
