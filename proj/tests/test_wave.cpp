#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fwlab/error.hpp"
#include "fwlab/wave.hpp"

using namespace fwlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Random data with spectrum confined to |xi| <= cutoff.
GridField band_limited(const GridSpec& g, double cutoff, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  GridField c(g, FieldDomain::frequency);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (frequency_modulus(g, i) <= cutoff) c[i] = {d(rng), d(rng)};
  return to_space(c);
}

GridField real_even(const GridField& f) { return enforce_real_even(f); }

GridField single_mode(const GridSpec& g, int m0, int m1) {
  GridField f(g, FieldDomain::space);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x0 = f.signed_index(i, 0) * g.spacing(), x1 = f.signed_index(i, 1) * g.spacing();
    f[i] = std::polar(1.0, 2.0 * kPi * (x0 * m0 + x1 * m1) / g.L);
  }
  return f;
}

double max_diff(const GridField& a, const GridField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("half wave propagator") {
  std::mt19937_64 rng(5);
  const GridSpec g{2, 64, 6.0};
  const auto f = band_limited(g, 4.0, rng);
  CHECK(max_diff(half_wave(f, 0.0), f) < 1e-12 * sup_norm(f));
  for (double t : {0.1, 0.37, 1.0}) CHECK(std::abs(l2_norm(half_wave(f, t)) - l2_norm(f)) < 1e-12 * l2_norm(f));
  const auto two_step = half_wave(half_wave(f, 0.3), 0.45);
  CHECK(max_diff(two_step, half_wave(f, 0.75)) < 1e-12 * sup_norm(f));

  const auto mode = single_mode(g, 3, 4);  // |xi0| = 5 / L
  const double xi0 = 5.0 / g.L;
  const auto flipped = half_wave(mode, 1.0 / (2.0 * xi0));
  for (std::size_t i = 0; i < mode.size(); i += 97) CHECK(std::abs(flipped[i] + mode[i]) < 1e-12);
}

TEST_CASE("cosine propagator") {
  std::mt19937_64 rng(8);
  const GridSpec g{2, 64, 6.0};
  const auto u0 = real_even(band_limited(g, 3.0, rng));
  const auto at0 = cosine_wave(u0, 0.0);
  for (std::size_t i = 0; i < u0.size(); i += 31) CHECK(at0[i].real() == doctest::Approx(u0[i].real() / std::sqrt(2.0)));

  SUBCASE("second difference in time matches the symbol") {
    auto m = single_mode(g, 2, 1);
    GridField mode = real_even(m);  // cos(2 pi x.xi0)
    const double w = 2.0 * kPi * std::sqrt(5.0) / g.L;
    const double t = 0.4, dt = 1e-3;
    const auto up = cosine_wave(mode, t + dt), mid = cosine_wave(mode, t), dn = cosine_wave(mode, t - dt);
    for (std::size_t i = 0; i < mode.size(); i += 53) {
      const double fd = (up[i].real() - 2.0 * mid[i].real() + dn[i].real()) / (dt * dt);
      CHECK(std::abs(fd + w * w * mid[i].real()) < 1e-4 * w * w);
    }
  }
  SUBCASE("pointwise domination by the two half waves") {
    const double t = 0.6;
    const auto c = cosine_wave(u0, t);
    const auto plus = half_wave(u0, t), minus = half_wave(u0, -t);
    for (std::size_t i = 0; i < u0.size(); ++i) CHECK(std::abs(c[i]) <= 0.5 * (std::abs(plus[i]) + std::abs(minus[i])) + 1e-12);
  }
  SUBCASE("wave equation residual") {
    const double t = 0.3;
    const auto u = cosine_wave(u0, t);
    CHECK(max_diff(cosine_wave_dtt(u0, t), laplacian(u)) < 1e-10 * sup_norm(laplacian(u)));
  }
  GridField odd(g, FieldDomain::space);
  odd[1] = 1.0;
  CHECK_THROWS_AS(cosine_wave(odd, 0.1), DomainError);
}

TEST_CASE("bessel potentials and sobolev norms") {
  std::mt19937_64 rng(9);
  const GridSpec g{2, 64, 4.0};
  const auto f = band_limited(g, 5.0, rng);
  CHECK(max_diff(bessel_potential(f, 0.0), f) < 1e-13 * sup_norm(f));
  CHECK(sobolev_norm(f, 0.0) == doctest::Approx(l2_norm(f)).epsilon(1e-12));
  CHECK(max_diff(bessel_potential(bessel_potential(f, 0.7), -0.7), f) < 1e-12 * sup_norm(f));

  // Band-k piece: spectrum inside 2^(k-2) <= |xi| <= 2^k.
  const AtomicMeasure atom(2, {0.0, 0.0}, {1.0}, true);
  const GridSpec big{2, 128, 4.0};
  const auto pieces = lp_decompose(atom, 3, big);
  const int k = 3;
  for (double s : {-1.0, 0.5, 1.5}) {
    const double top = std::pow(1.0 + 4.0 * kPi * kPi * std::pow(4.0, k), s / 2.0);
    const double bot = std::pow(1.0 + 4.0 * kPi * kPi * std::pow(4.0, k - 2), s / 2.0);
    const double ratio = sobolev_norm(pieces[k].field, s) / l2_norm(pieces[k].field);
    CHECK(ratio >= std::min(top, bot) * (1 - 1e-12));
    CHECK(ratio <= std::max(top, bot) * (1 + 1e-12));
  }
}

TEST_CASE("fractional laplacian") {
  const GridSpec g{2, 32, 4.0};
  const auto mode = single_mode(g, 1, 2);
  const double lam = 4.0 * kPi * kPi * 5.0 / (g.L * g.L);
  const auto r = frac_laplacian(mode, 1.0);
  for (std::size_t i = 0; i < mode.size(); i += 7) CHECK(std::abs(r.field[i] - lam * mode[i]) < 1e-10 * lam);

  std::mt19937_64 rng(2);
  auto f = band_limited(g, 3.0, rng);
  const cplx mean = integral(f) / (g.L * g.L);
  const auto inv = frac_laplacian(f, -1.0);
  CHECK(inv.projected_mean == doctest::Approx((mean * g.L * g.L).real()));
  const auto back = frac_laplacian(inv.field, 1.0).field;
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(back[i] - (f[i] - mean)));
  CHECK(worst < 1e-12 * sup_norm(f));
  CHECK_THROWS_AS(frac_laplacian(f, -0.5, ZeroMode::reject), DomainError);
}

TEST_CASE("time and space derivatives") {
  std::mt19937_64 rng(4);
  const GridSpec g{2, 64, 5.0};
  const auto f = band_limited(g, 4.0, rng);

  // Plancherel for the gradient.
  const auto grad = spatial_gradient(f);
  double lhs = 0.0;
  for (const auto& c : grad) lhs += std::pow(l2_norm(c), 2);
  const auto spec = to_frequency(f);
  double rhs = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i)
    rhs += std::pow(2.0 * kPi * frequency_modulus(g, i), 2) * std::norm(spec[i]) * g.L * g.L;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

  // Central differences of the propagator.
  const double t = 0.25, dt = 1e-4;
  const auto fd_up = half_wave(f, t + dt), fd_dn = half_wave(f, t - dt);
  const auto dtu = time_derivative(f, t);
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs((fd_up[i] - fd_dn[i]) / (2 * dt) - dtu[i]));
  CHECK(err < 1e-5 * sup_norm(dtu));

  // |u_t|^2 - |grad u|^2 integrates to zero.
  const auto u = half_wave(f, t);
  const auto gu = spatial_gradient(u);
  double energy = std::pow(l2_norm(dtu), 2);
  for (const auto& c : gu) energy -= std::pow(l2_norm(c), 2);
  CHECK(std::abs(energy) < 1e-10 * rhs);
}

TEST_CASE("trapezoid time grid") {
  const auto q = trapezoid_times(65);
  double s = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < q.times.size(); ++i) {
    s += q.weights[i];
    lin += q.weights[i] * q.times[i];
  }
  CHECK(s == doctest::Approx(1.0));
  CHECK(lin == doctest::Approx(0.5));
  CHECK_THROWS_AS(trapezoid_times(1), ParameterError);
}
