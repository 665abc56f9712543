#include "fwlab/nullform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fwlab/error.hpp"
#include "fwlab/wave.hpp"

namespace fwlab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

GridField spectrum_of(const GridField& f) { return f.domain() == FieldDomain::space ? to_frequency(f) : f; }

double spectral_radius(const GridField& c) {
  double cmax = 0.0;
  for (const auto& v : c.values()) cmax = std::max(cmax, std::abs(v));
  double r = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (std::abs(c[i]) > 1e-14 * cmax) r = std::max(r, frequency_modulus(c.grid(), i));
  return r;
}

// Largest per-axis |index| carrying a coefficient above the relative floor.
int axis_reach(const GridField& c) {
  double cmax = 0.0;
  for (const auto& v : c.values()) cmax = std::max(cmax, std::abs(v));
  int reach = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (std::abs(c[i]) > 1e-14 * cmax)
      for (int a = 0; a < c.grid().n; ++a) reach = std::max(reach, std::abs(c.signed_index(i, a)));
  return reach;
}

void require_unaliased_product(const GridField& c, const char* what) {
  if (2 * axis_reach(c) >= c.grid().N / 2) throw ParameterError(std::string(what) + ": spectrum too wide, |u|^2 would alias");
}

// Spatial u, d_t u and grad u of the half-wave at time t, from the spectrum c.
struct WaveSnapshot {
  GridField u, ut;
  std::vector<GridField> grad;
};

WaveSnapshot snapshot(const GridField& c, double t, bool with_grad) {
  const GridSpec& g = c.grid();
  GridField cu(g, FieldDomain::frequency), ct(g, FieldDomain::frequency);
  std::vector<GridField> cg;
  if (with_grad) cg.assign(g.n, GridField(g, FieldDomain::frequency));
  double xi[3];
  for (std::size_t i = 0; i < c.size(); ++i) {
    frequency_of(g, i, xi);
    double r2 = 0.0;
    for (int a = 0; a < g.n; ++a) r2 += xi[a] * xi[a];
    const double rho = std::sqrt(r2);
    const cplx v = c[i] * std::polar(1.0, kTwoPi * t * rho);
    cu[i] = v;
    ct[i] = cplx{0.0, kTwoPi * rho} * v;
    if (with_grad)
      for (int a = 0; a < g.n; ++a) cg[a][i] = cplx{0.0, kTwoPi * xi[a]} * v;
  }
  WaveSnapshot s{to_space(cu), to_space(ct), {}};
  for (auto& f : cg) s.grad.push_back(to_space(f));
  return s;
}

GridField energy_from(const WaveSnapshot& s) {
  GridField e(s.u.grid(), FieldDomain::space);
  for (std::size_t i = 0; i < e.size(); ++i) {
    double v = std::norm(s.ut[i]);
    for (const auto& gf : s.grad) v -= std::norm(gf[i]);
    e[i] = {v, 0.0};
  }
  return e;
}

GridField modulus_squared(const GridField& u) {
  GridField m(u.grid(), FieldDomain::space);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = {std::norm(u[i]), 0.0};
  return m;
}

double cell_volume(const GridSpec& g) { return std::pow(g.spacing(), g.n); }

void grid_point(const GridSpec& g, std::size_t flat, double* x) {
  for (int a = g.n - 1; a >= 0; --a) {
    const int j = static_cast<int>(flat % static_cast<std::size_t>(g.N));
    flat /= static_cast<std::size_t>(g.N);
    x[a] = (j < g.N / 2 ? j : j - g.N) * g.spacing();
  }
}
}  // namespace

GridField null_energy(const GridField& u0, double t) { return energy_from(snapshot(spectrum_of(u0), t, true)); }

NullIdentityReport null_identity_check(const GridField& u0, double t, double dt) {
  const GridField c = spectrum_of(u0);
  require_unaliased_product(c, "null identity check");
  const double rho = spectral_radius(c);
  if (!(dt > 0.0)) dt = std::ldexp(1.0, -static_cast<int>(std::ceil(std::log2(std::max(rho, 1.0)))) - 7);
  NullIdentityReport out;
  out.dt = dt;

  const WaveSnapshot s0 = snapshot(c, t, true);
  const GridField energy = energy_from(s0);
  const GridField m0 = modulus_squared(s0.u);
  auto m_at = [&](double tt) { return modulus_squared(snapshot(c, tt, false).u); };
  const GridField mp = m_at(t + dt), mm = m_at(t - dt), mp2 = m_at(t + dt / 2), mm2 = m_at(t - dt / 2);
  const GridField lap = laplacian(m0);

  for (std::size_t i = 0; i < energy.size(); ++i) {
    const double d1 = (mp[i].real() - 2.0 * m0[i].real() + mm[i].real()) / (dt * dt);
    const double d2 = (mp2[i].real() - 2.0 * m0[i].real() + mm2[i].real()) / (dt * dt / 4.0);
    const double dtt = (4.0 * d2 - d1) / 3.0;
    const double two_n = 2.0 * energy[i].real();
    out.residual = std::max(out.residual, std::abs(dtt - lap[i].real() - two_n));
    out.scale = std::max({out.scale, std::abs(dtt), std::abs(lap[i].real()), std::abs(two_n)});
  }
  out.relative = out.scale > 0.0 ? out.residual / out.scale : 0.0;
  out.mean = integral(energy).real();
  const double h1 = sobolev_norm(u0, 1.0);
  out.mean_relative = h1 > 0.0 ? std::abs(out.mean) / (h1 * h1) : 0.0;
  return out;
}

InverseLaplacianWeight inverse_laplacian_weight(const AtomicMeasure& mu, const GridSpec& grid, double R) {
  if (grid.n < 2) throw ParameterError("the inverse-Laplacian weight needs n >= 2");
  if (!(R > 0.0)) R = std::nextafter(grid.nyquist() / 4.0, 0.0);
  const GridField mu_R = mollify_measure(mu, R, grid);
  FracLaplacianResult w = frac_laplacian(mu_R, -1.0, ZeroMode::project);
  InverseLaplacianWeight out;
  out.cutoff = R;
  out.projected_mean = w.projected_mean;
  out.field = mu.is_even() ? enforce_real_even(w.field) : w.field;
  for (const auto& v : out.field.values()) out.sup = std::max(out.sup, v.real());
  return out;
}

double newton_constant(int n) {
  if (n < 3) throw ParameterError("the Newton kernel is a power only for n >= 3");
  return std::tgamma(n / 2.0 - 1.0) / (4.0 * std::pow(kPi, n / 2.0));
}

std::vector<double> riesz_kernel_sum(const AtomicMeasure& mu, std::span<const double> points, double exponent) {
  const int n = mu.dimension();
  if (points.size() % static_cast<std::size_t>(n) != 0) throw ParameterError("point buffer not a multiple of n");
  const std::size_t X = points.size() / n;
  const double* y = mu.positions().data();
  std::vector<double> out(X, 0.0);
  for (std::size_t p = 0; p < X; ++p) {
    double acc = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      double d2 = 0.0;
      for (int a = 0; a < n; ++a) {
        const double d = points[p * n + a] - y[j * n + a];
        d2 += d * d;
      }
      acc += mu.weight(j) * std::pow(d2, -exponent / 2.0);
    }
    out[p] = acc;
  }
  return out;
}

WeightRefinement weight_refinement(const AtomicMeasure& mu, const GridSpec& coarse, int levels) {
  if (levels < 2) throw ParameterError("weight refinement needs at least two levels");
  WeightRefinement out;
  out.unbounded = true;
  GridSpec g = coarse;
  for (int l = 0; l < levels; ++l, g.N *= 2) {
    out.N.push_back(g.N);
    out.sup.push_back(inverse_laplacian_weight(mu, g).sup);
    if (l > 0 && !(out.sup[l] > 1.15 * out.sup[l - 1])) out.unbounded = false;
  }
  out.growth = out.sup.back() / out.sup.front();
  return out;
}

GammaStarValue gamma_star_functional(const GridField& u0, const InverseLaplacianWeight& weight, const GridField& mu_R,
                                     double frostman_constant, double sigma, int time_count) {
  if (time_count < 2) throw ParameterError("gamma* functional needs at least two time samples");
  const GridField c = spectrum_of(u0);
  const GridSpec& g = c.grid();
  const double dv = cell_volume(g);
  const double mean_density = weight.projected_mean / std::pow(g.L, g.n);
  const TimeQuadrature tq = trapezoid_times(time_count);

  GammaStarValue out;
  double boundary = 0.0;
  for (std::size_t q = 0; q < tq.times.size(); ++q) {
    const WaveSnapshot s = snapshot(c, tq.times[q], true);
    const GridField e = energy_from(s);
    double f = 0.0, a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double w = weight.field[i].real();
      f += e[i].real() * w;
      a += std::norm(s.u[i]) * (mu_R[i].real() - mean_density);
      b += 2.0 * (std::conj(s.u[i]) * s.ut[i]).real() * w;
    }
    out.functional += tq.weights[q] * f * dv;
    out.measure_term += tq.weights[q] * 0.5 * a * dv;
    if (q == 0) boundary -= b * dv;
    if (q + 1 == tq.times.size()) boundary += b * dv;
  }
  out.boundary_term = 0.5 * boundary;
  const double big = std::max({std::abs(out.functional), std::abs(out.measure_term), std::abs(out.boundary_term)});
  out.chain_residual = big > 0.0 ? std::abs(out.functional - out.measure_term - out.boundary_term) / big : 0.0;
  const double hs = sobolev_norm(u0, sigma);
  out.rhs = frostman_constant * hs * hs;
  out.ratio = out.rhs > 0.0 ? out.functional / out.rhs : 0.0;
  return out;
}

GammaStarReport estimate_gamma_star(const AtomicMeasure& mu, const FrostmanReport& frostman, int k_min, int k_max,
                                    const GridSpec& grid, int time_count) {
  if (k_min < 0 || k_max - k_min < 2) throw ParameterError("estimate_gamma_star needs at least three bands");
  if (!(std::ldexp(1.0, k_max) < grid.nyquist() / 2.0))
    throw ParameterError("band " + std::to_string(k_max) + " reaches half the grid Nyquist frequency");
  const int n = grid.n;
  GammaStarReport out;
  out.alpha = frostman.alpha;
  out.in_scope = frostman.alpha > 0.0 && frostman.alpha <= n - 2;
  const InverseLaplacianWeight w = inverse_laplacian_weight(mu, grid);
  const GridField mu_R = mollify_measure(mu, w.cutoff, grid);
  const GridField spec = measure_spectrum(mu, grid, std::ldexp(1.0, k_max));
  std::vector<std::pair<double, double>> pts;
  for (int k = k_min; k <= k_max; ++k) {
    const LittlewoodPaleyPiece piece = lp_piece(spec, k, mu.total_mass(), mu.is_even());
    const int T = time_count > 0 ? time_count : default_time_count(std::ldexp(1.0, k));
    const GammaStarValue v = gamma_star_functional(piece.field, w, mu_R, frostman.constant_estimate, 0.0, T);
    GammaStarSample s;
    s.k = k;
    s.functional = v.functional;
    s.boundary_term = v.boundary_term;
    s.l2 = l2_norm(piece.field);
    out.samples.push_back(s);
    pts.emplace_back(std::ldexp(1.0, k), std::abs(v.functional) / (s.l2 * s.l2));
  }
  out.fit = fit_exponent(pts);
  out.gamma_star = (n - frostman.alpha) / 2.0 - out.fit.slope / 2.0;
  return out;
}

RieszBoundReport riesz_bound_check(const AtomicMeasure& mu, const FrostmanReport& frostman, double alpha_prime,
                                   const GridSpec& grid, double floor) {
  if (!(alpha_prime > 0.0 && alpha_prime < frostman.alpha)) throw RangeError("Riesz bound needs 0 < alpha' < alpha");
  if (grid.n != mu.dimension()) throw ParameterError("grid and measure dimensions differ");
  const int n = grid.n;
  const double* y = mu.positions().data();
  if (!(floor > 0.0)) {
    double d2min = INFINITY;
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = i + 1; j < mu.size(); ++j) {
        double d2 = 0.0;
        for (int a = 0; a < n; ++a) d2 += (y[i * n + a] - y[j * n + a]) * (y[i * n + a] - y[j * n + a]);
        if (d2 > 0.0) d2min = std::min(d2min, d2);
      }
    floor = std::isfinite(d2min) ? std::sqrt(d2min) : grid.spacing();
  }
  RieszBoundReport out;
  out.alpha = frostman.alpha;
  out.alpha_prime = alpha_prime;
  out.floor = floor;
  const double gap = frostman.alpha - alpha_prime;
  out.dyadic_constant = std::exp2(frostman.alpha + 3.0 * gap) / (1.0 - std::exp2(-gap));

  std::vector<double> near, far;
  double x[3];
  for (std::size_t i = 0; i < grid.total(); ++i) {
    grid_point(grid, i, x);
    double r2 = 0.0, dmin2 = INFINITY;
    for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
    for (std::size_t j = 0; j < mu.size(); ++j) {
      double d2 = 0.0;
      for (int a = 0; a < n; ++a) d2 += (x[a] - y[j * n + a]) * (x[a] - y[j * n + a]);
      dmin2 = std::min(dmin2, d2);
    }
    if (r2 > 9.0)
      far.insert(far.end(), x, x + n);
    else if (dmin2 >= floor * floor)
      near.insert(near.end(), x, x + n);
  }
  // Offsets at exactly the floor distance from each atom carry the near-field maximum.
  for (std::size_t j = 0; j < mu.size(); ++j)
    for (int a = 0; a < n; ++a)
      for (double sgn : {-1.0, 1.0}) {
        for (int b = 0; b < n; ++b) x[b] = y[j * n + b];
        x[a] += sgn * floor;
        bool clear = true;
        for (std::size_t m = 0; m < mu.size() && clear; ++m) {
          double d2 = 0.0;
          for (int b = 0; b < n; ++b) d2 += (x[b] - y[m * n + b]) * (x[b] - y[m * n + b]);
          clear = d2 >= floor * floor * (1.0 - 1e-12);
        }
        if (clear) near.insert(near.end(), x, x + n);
      }
  out.points_used = near.size() / n;
  for (double v : riesz_kernel_sum(mu, near, alpha_prime)) out.sup = std::max(out.sup, v);
  for (double v : riesz_kernel_sum(mu, far, alpha_prime)) out.far_sup = std::max(out.far_sup, v);
  out.far_within_mass = out.far_sup <= mu.total_mass() * (1.0 + 1e-12);
  out.worst_constant = out.sup / frostman.constant_estimate;
  return out;
}

LeibnizReport fractional_leibniz_check(const GridField& g, const GridField& h, double s) {
  if (!(s >= 0.0)) throw ParameterError("fractional Leibniz check needs s >= 0");
  const GridField cg = spectrum_of(g), ch = spectrum_of(h);
  if (axis_reach(cg) + axis_reach(ch) >= g.grid().N / 2) throw ParameterError("fractional Leibniz check: gh would alias");
  const GridField gs = g.domain() == FieldDomain::space ? g : to_space(g);
  const GridField hs = h.domain() == FieldDomain::space ? h : to_space(h);
  GridField prod(gs.grid(), FieldDomain::space);
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = gs[i] * hs[i];
  LeibnizReport out;
  out.lhs = l1_norm(frac_laplacian(prod, s).field);
  out.rhs = l2_norm(frac_laplacian(gs, s).field) * l2_norm(hs) + l2_norm(gs) * l2_norm(frac_laplacian(hs, s).field);
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

}  // namespace fwlab
