#include "fwlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "fwlab/error.hpp"
#include "fwlab/gemm.hpp"
#include "fwlab/wave.hpp"

namespace fwlab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double sphere_area(int n) {
  if (n == 1) return 2.0;
  if (n == 2) return kTwoPi;
  if (n == 3) return 4.0 * kPi;
  throw ParameterError("sphere area needed for n <= 3 only");
}

GridField spatial(const GridField& f) { return f.domain() == FieldDomain::space ? f : to_space(f); }

// |u(x_j, t_q)| for every atom and time, row-major atoms x times.
std::vector<cplx> atom_series(const GridField& u0, const AtomicMeasure& mu, Propagator prop,
                              std::span<const double> times) {
  if (u0.grid().n != mu.dimension()) throw ParameterError("field and measure dimensions differ");
  const ModeSet modes = collect_modes(u0);
  return evolve_at(modes, prop, mu.positions(), times);
}

Propagator derivative_of(Propagator prop) {
  switch (prop) {
    case Propagator::half_wave: return Propagator::half_wave_dt;
    case Propagator::cosine: return Propagator::cosine_dt;
    default: return Propagator::identity;
  }
}

double time_integral(const std::vector<double>& w, const cplx* row, double p) {
  double acc = 0.0;
  for (std::size_t q = 0; q < w.size(); ++q) acc += w[q] * std::pow(std::abs(row[q]), p);
  return acc;
}
}  // namespace

double ExponentFit::predict(double scale) const {
  const double tol = 1e-12 * std::max(1.0, scale_max);
  if (!(scale >= scale_min - tol && scale <= scale_max + tol))
    throw RangeError("exponent fit does not extrapolate beyond the sampled scales");
  return std::exp2(intercept + slope * std::log2(scale));
}

ExponentFit fit_exponent(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 3) throw ParameterError("exponent fit needs at least three samples");
  ExponentFit fit;
  fit.scale_min = samples[0].first;
  fit.scale_max = samples[0].first;
  for (const auto& [scale, value] : samples) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ParameterError("exponent fit scales must be positive");
    if (!(value > 0.0) || !std::isfinite(value)) throw ParameterError("exponent fit values must be positive");
    fit.samples.emplace_back(std::log2(scale), std::log2(value));
    fit.scale_min = std::min(fit.scale_min, scale);
    fit.scale_max = std::max(fit.scale_max, scale);
  }
  const double m = static_cast<double>(fit.samples.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : fit.samples) {
    sx += x;
    sy += y;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : fit.samples) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw ParameterError("exponent fit needs at least two distinct scales");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rr = 0.0;
  for (const auto& [x, y] : fit.samples) {
    const double r = y - (fit.intercept + fit.slope * x);
    rr += r * r;
  }
  fit.residual_rms = std::sqrt(rr / m);
  return fit;
}

double lp_mu_norm(const GridField& field, const AtomicMeasure& mu, double p) {
  if (!(p >= 1.0)) throw ParameterError("lp_mu_norm needs p >= 1");
  const double t0 = 0.0;
  const auto v = atom_series(field, mu, Propagator::identity, {&t0, 1});
  double acc = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) acc += mu.weight(j) * std::pow(std::abs(v[j]), p);
  return std::pow(acc, 1.0 / p);
}

double fixed_time_ratio(const GridField& u0, const AtomicMeasure& mu, const FrostmanReport& frostman, double p,
                        double s, double t) {
  if (!(p >= 1.0)) throw ParameterError("fixed_time_ratio needs p >= 1");
  if (!(s > 0.0)) throw ParameterError("fixed_time_ratio needs s > 0");
  const double hs = sobolev_norm(u0, s);
  if (hs == 0.0) throw ParameterError("fixed_time_ratio needs nonzero initial data");
  const auto v = atom_series(u0, mu, Propagator::half_wave, {&t, 1});
  double acc = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) acc += mu.weight(j) * std::pow(std::abs(v[j]), p);
  const double denom = std::pow(mu.total_mass(), 1.0 / p - 0.5) * std::sqrt(frostman.constant_estimate) * hs;
  return std::pow(acc, 1.0 / p) / denom;
}

double band_kernel(int n, double R, double rho) {
  // Fourier transform of the indicator of the ball of radius a, evaluated at rho.
  auto ball = [n, rho](double a) {
    if (n == 1) return rho == 0.0 ? 2.0 * a : std::sin(kTwoPi * a * rho) / (kPi * rho);
    if (n == 2) return rho == 0.0 ? kPi * a * a : a * std::cyl_bessel_j(1.0, kTwoPi * a * rho) / rho;
    const double x = kTwoPi * a * rho;
    if (x < 1e-3) return 4.0 * kPi * a * a * a / 3.0 * (1.0 - x * x / 10.0);
    return (std::sin(x) - x * std::cos(x)) / (2.0 * kPi * kPi * rho * rho * rho);
  };
  if (n < 1 || n > 3) throw ParameterError("band kernel supports n = 1, 2, 3");
  return ball(2.0 * R) - ball(R);
}

BandTraceReport band_trace_sup(const AtomicMeasure& mu, double R, int max_iterations, double tolerance,
                               unsigned seed) {
  if (!(R > 0.0)) throw ParameterError("band radius must be positive");
  if (max_iterations < 2) throw ParameterError("band_trace_sup needs at least two iterations");
  const std::size_t P = mu.size();
  if (P == 0) throw ParameterError("band_trace_sup needs a nonempty measure");
  if (P > 20000) throw ResourceError("band_trace_sup Gram matrix exceeds 20000 atoms");
  const int n = mu.dimension();
  const double* x = mu.positions().data();

  double reach = 0.0;
  for (std::size_t i = 0; i < P * n; ++i) reach = std::max(reach, std::abs(x[i]));
  const double diam = 2.0 * reach * std::sqrt(static_cast<double>(n));
  const double step = 1.0 / (1024.0 * R);
  const std::size_t cells = static_cast<std::size_t>(std::ceil(diam / step)) + 2;
  std::vector<double> table(cells);
  for (std::size_t i = 0; i < cells; ++i) table[i] = band_kernel(n, R, i * step);

  std::vector<double> sw(P);
  for (std::size_t i = 0; i < P; ++i) sw[i] = std::sqrt(mu.weight(i));
  std::vector<float> G(P * P);
  for (std::size_t i = 0; i < P; ++i) {
    G[i * P + i] = static_cast<float>(table[0] * sw[i] * sw[i]);
    for (std::size_t j = i + 1; j < P; ++j) {
      double d2 = 0.0;
      for (int a = 0; a < n; ++a) {
        const double d = x[i * n + a] - x[j * n + a];
        d2 += d * d;
      }
      const double u = std::sqrt(d2) / step;
      const std::size_t c = static_cast<std::size_t>(u);
      const double k = table[c] + (u - c) * (table[c + 1] - table[c]);
      G[i * P + j] = static_cast<float>(k * sw[i] * sw[j]);
    }
  }

  // Largest eigenvalue of the symmetric tridiagonal (a, b) by Sturm bisection.
  auto top_eigenvalue = [](const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t m = a.size();
    double lo = a[0], hi = a[0];
    for (std::size_t i = 0; i < m; ++i) {
      const double r = (i > 0 ? std::abs(b[i - 1]) : 0.0) + (i + 1 < m ? std::abs(b[i]) : 0.0);
      lo = std::min(lo, a[i] - r);
      hi = std::max(hi, a[i] + r);
    }
    auto above = [&](double s) {  // eigenvalues greater than s
      int count = 0;
      double q = 1.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double bb = i > 0 ? b[i - 1] * b[i - 1] : 0.0;
        q = a[i] - s - (i > 0 ? bb / q : 0.0);
        if (q == 0.0) q = -1e-300;
        if (q > 0.0) ++count;
      }
      return count;
    };
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(std::abs(hi), 1.0); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (above(mid) > 0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::vector<double>> V;
  std::vector<double> v(P), w(P), alpha, beta;
  std::vector<float> vf(P), wf(P);
  for (auto& e : v) e = unif(rng);
  auto dot = [P](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < P; ++i) s += a[i] * b[i];
    return s;
  };
  double nv = std::sqrt(dot(v, v));
  for (auto& e : v) e /= nv;

  BandTraceReport out;
  double lambda = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    V.push_back(v);
    for (std::size_t i = 0; i < P; ++i) vf[i] = static_cast<float>(v[i]);
    blas::ssymv(P, G.data(), vf.data(), wf.data());
    for (std::size_t i = 0; i < P; ++i) w[i] = wf[i];
    alpha.push_back(dot(w, v));
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : V) {
        const double c = dot(w, u);
        for (std::size_t i = 0; i < P; ++i) w[i] -= c * u[i];
      }
    const double lam = top_eigenvalue(alpha, beta);
    out.iterations = it;
    out.ritz_change = lambda > 0.0 ? std::abs(lam - lambda) / lam : 1.0;
    lambda = lam;
    const double bnorm = std::sqrt(dot(w, w));
    if ((it > 2 && out.ritz_change < tolerance) || bnorm <= 1e-12 * std::abs(lam) || it == static_cast<int>(P)) break;
    beta.push_back(bnorm);
    for (std::size_t i = 0; i < P; ++i) v[i] = w[i] / bnorm;
  }
  out.ratio = std::sqrt(std::max(lambda, 0.0));
  return out;
}

int default_time_count(double rho_max) { return std::max(65, 16 * static_cast<int>(std::ceil(rho_max)) + 1); }

double strichartz_norm(const GridField& u0, const AtomicMeasure& mu, double p, int time_count, Propagator prop) {
  if (!(p >= 1.0)) throw ParameterError("strichartz_norm needs p >= 1");
  const TimeQuadrature tq = trapezoid_times(time_count);
  const auto v = atom_series(u0, mu, prop, tq.times);
  const std::size_t T = tq.times.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) acc += mu.weight(j) * time_integral(tq.weights, &v[j * T], p);
  return std::pow(acc, 1.0 / p);
}

MaximalReport maximal_norm(const GridField& u0, const AtomicMeasure& mu, double p, int time_count,
                           Propagator prop) {
  if (!(p >= 1.0)) throw ParameterError("maximal_norm needs p >= 1");
  const ModeSet modes = collect_modes(u0);
  auto sup_norm_on = [&](int count, std::vector<cplx>* series, TimeQuadrature* quad) {
    const TimeQuadrature tq = trapezoid_times(count);
    auto v = evolve_at(modes, prop, mu.positions(), tq.times);
    double acc = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      double m = 0.0;
      for (std::size_t q = 0; q < tq.times.size(); ++q) m = std::max(m, std::abs(v[j * tq.times.size() + q]));
      acc += mu.weight(j) * std::pow(m, p);
    }
    if (series) *series = std::move(v);
    if (quad) *quad = tq;
    return std::pow(acc, 1.0 / p);
  };

  MaximalReport out;
  std::vector<cplx> F;
  TimeQuadrature tq;
  out.norm = sup_norm_on(time_count, &F, &tq);
  const auto dF = evolve_at(modes, derivative_of(prop), mu.positions(), tq.times);
  const bool constant_in_time = prop == Propagator::identity;
  const std::size_t T = tq.times.size();
  double strich = 0.0;
  out.ftc_worst_margin = 1.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    double m = 0.0;
    for (std::size_t q = 0; q < T; ++q) m = std::max(m, std::abs(F[j * T + q]));
    const double fp = time_integral(tq.weights, &F[j * T], p);
    const double dp = constant_in_time ? 0.0 : time_integral(tq.weights, &dF[j * T], p);
    strich += mu.weight(j) * fp;
    const double lhs = std::pow(m, p);
    const double rhs = fp + p * std::pow(fp, (p - 1.0) / p) * std::pow(dp, 1.0 / p);
    if (rhs > 0.0) {
      const double margin = (rhs - lhs) / rhs;
      out.ftc_worst_margin = std::min(out.ftc_worst_margin, margin);
      if (margin < -1e-8) out.ftc_holds = false;
    }
  }
  out.strichartz = std::pow(strich, 1.0 / p);
  out.refined_norm = sup_norm_on(2 * time_count - 1, nullptr, nullptr);
  out.refinement_change = out.refined_norm > 0.0 ? std::abs(out.refined_norm - out.norm) / out.refined_norm : 0.0;
  return out;
}

GammaReport estimate_gamma(const AtomicMeasure& mu, const FrostmanReport& frostman, double p, int k_min, int k_max,
                           const GridSpec& grid, bool with_maximal) {
  if (!(p >= 1.0)) throw ParameterError("estimate_gamma needs p >= 1");
  if (k_min < 0 || k_max - k_min < 2) throw ParameterError("estimate_gamma needs at least three bands");
  if (!(std::ldexp(1.0, k_max) < grid.nyquist()))
    throw ParameterError("band " + std::to_string(k_max) + " reaches the grid Nyquist frequency");
  if (!mu.is_even()) throw DomainError("estimate_gamma requires an even measure");
  const int n = grid.n;
  const GridField spec = measure_spectrum(mu, grid, std::ldexp(1.0, k_max));

  GammaReport out;
  out.p = p;
  out.alpha = frostman.alpha;
  const double cp = std::pow(frostman.constant_estimate, 1.0 / p);
  std::vector<std::pair<double, double>> s_l2, s_h1, s_max;
  for (int k = k_min; k <= k_max; ++k) {
    const LittlewoodPaleyPiece piece = lp_piece(spec, k, mu.total_mass(), true);
    GammaSample g;
    g.k = k;
    g.l2 = l2_norm(piece.field);
    g.h1 = sobolev_norm(piece.field, 1.0);
    const TimeQuadrature tq = trapezoid_times(default_time_count(std::ldexp(1.0, k)));
    const auto v = atom_series(piece.field, mu, Propagator::cosine, tq.times);
    const std::size_t T = tq.times.size();
    double acc = 0.0, accmax = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      acc += mu.weight(j) * time_integral(tq.weights, &v[j * T], p);
      double m = 0.0;
      for (std::size_t q = 0; q < T; ++q) m = std::max(m, std::abs(v[j * T + q]));
      accmax += mu.weight(j) * std::pow(m, p);
    }
    g.strichartz = std::pow(acc, 1.0 / p);
    g.maximal = with_maximal ? std::pow(accmax, 1.0 / p) : 0.0;
    g.ratio = g.strichartz / (cp * g.l2);
    out.samples.push_back(g);
    const double scale = std::ldexp(1.0, k);
    s_l2.emplace_back(scale, g.ratio);
    s_h1.emplace_back(scale, g.strichartz / g.h1);
    if (with_maximal) s_max.emplace_back(scale, g.maximal / g.l2);
  }
  out.fit_l2 = fit_exponent(s_l2);
  out.fit_sobolev = fit_exponent(s_h1);
  if (with_maximal) out.fit_maximal = fit_exponent(s_max);
  out.s = out.fit_l2.slope;
  out.gamma_est = (n - frostman.alpha) / 2.0 - out.s;
  out.gamma_est_sobolev = (n - frostman.alpha) / 2.0 - (out.fit_sobolev.slope + 1.0);
  out.requirement_met = out.s < (frostman.alpha - 1.0) / 2.0;
  return out;
}

double sphere_decay_norm(const AtomicMeasure& mu, double R, int sphere_points) {
  if (!(R >= 2.0)) throw ParameterError("sphere_decay_norm needs R >= 2");
  const AtomicMeasure S = build_sphere_measure(1.0, mu.dimension(), sphere_points);
  std::vector<double> xi(S.positions());
  for (double& x : xi) x *= R;
  const auto v = measure_ft_complex(mu, xi);
  double acc = 0.0;
  for (std::size_t i = 0; i < S.size(); ++i) acc += S.weight(i) * std::norm(v[i]);
  return acc;
}

BetaReport estimate_beta(const AtomicMeasure& mu, const FrostmanReport& frostman, std::span<const double> radii,
                         int sphere_points) {
  BetaReport out;
  const double norm = mu.total_mass() * frostman.constant_estimate;
  std::vector<std::pair<double, double>> samples;
  for (double R : radii) {
    const double v = sphere_decay_norm(mu, R, sphere_points);
    out.values.push_back(v);
    samples.emplace_back(R, v / norm);
  }
  out.fit = fit_exponent(samples);
  out.beta = -out.fit.slope;
  return out;
}

double cone_mass(int n) { return std::sqrt(2.0) * sphere_area(n) * (std::pow(2.0, n) - 1.0) / n; }

double cone_decay_norm(const SpacetimeMeasure& nu, double R, int sphere_points, int radial_points) {
  if (!(R >= 2.0)) throw ParameterError("cone_decay_norm needs R >= 2");
  if (radial_points < 1) throw ParameterError("cone_decay_norm needs radial points");
  const int n = nu.spatial_dimension();
  if (n != 2 && n != 3) throw ParameterError("cone_decay_norm supports n = 2 or 3");
  const AtomicMeasure S = build_sphere_measure(1.0, n, sphere_points);
  const AtomicMeasure atoms = nu.as_atomic();

  std::vector<double> freq, weight;
  const double dr = 1.0 / radial_points;
  for (int i = 0; i < radial_points; ++i) {
    const double a = 1.0 + i * dr, b = a + dr;
    const double r = 0.5 * (a + b);
    const double wr = std::sqrt(2.0) * (std::pow(b, n) - std::pow(a, n)) / n;
    for (std::size_t s = 0; s < S.size(); ++s) {
      for (int c = 0; c < n; ++c) freq.push_back(R * r * S.positions()[s * n + c]);
      freq.push_back(R * r);
      weight.push_back(wr * S.weight(s));
    }
  }
  const auto v = measure_ft_complex(atoms, freq);
  double acc = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) acc += weight[i] * std::norm(v[i]);
  return acc;
}

WeakTypeReport weak_type_check(const GridField& f_band, double R, const SpacetimeMeasure& nu,
                               const FrostmanReport& frostman, std::span<const double> lambdas, double q,
                               int layer_levels) {
  if (!(R > 0.0)) throw ParameterError("weak_type_check needs R > 0");
  if (!(q >= 1.0)) throw ParameterError("weak_type_check needs q >= 1");
  const GridSpec& g = f_band.grid();
  const int n = g.n;
  if (nu.spatial_dimension() != n) throw ParameterError("field and measure dimensions differ");

  const GridField c = f_band.domain() == FieldDomain::frequency ? f_band : to_frequency(f_band);
  double cmax = 0.0;
  for (const auto& v : c.values()) cmax = std::max(cmax, std::abs(v));
  std::size_t support = 0;
  for (const auto& v : c.values())
    if (cmax > 0.0 && std::abs(v) > 1e-14 * cmax) ++support;
  const double f2 = l2_norm(spatial(f_band));
  const double Ln = std::pow(g.L, n);

  // Evaluate on the distinct spatial points and times, then scatter to atoms.
  std::map<std::vector<double>, std::size_t> xs;
  std::map<double, std::size_t> ts;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    const auto pt = nu.point(j);
    xs.emplace(std::vector<double>(pt.begin(), pt.begin() + n), 0);
    ts.emplace(pt[n], 0);
  }
  std::vector<double> xflat, tflat;
  for (auto& [x, id] : xs) {
    id = xflat.size() / n;
    xflat.insert(xflat.end(), x.begin(), x.end());
  }
  for (auto& [t, id] : ts) {
    id = tflat.size();
    tflat.push_back(t);
  }
  const ModeSet modes = collect_modes(c);
  std::vector<double> amp(nu.size());
  if (xs.size() * ts.size() <= 4 * nu.size()) {
    const auto v = evolve_at(modes, Propagator::half_wave, xflat, tflat);
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const auto pt = nu.point(j);
      const std::size_t xi = xs.at(std::vector<double>(pt.begin(), pt.begin() + n));
      amp[j] = std::abs(v[xi * tflat.size() + ts.at(pt[n])]);
    }
  } else {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const auto pt = nu.point(j);
      const double t = pt[n];
      amp[j] = std::abs(evolve_at(modes, Propagator::half_wave, pt.first(n), {&t, 1})[0]);
    }
  }

  WeakTypeReport out;
  out.q = q;
  for (double a : amp) out.sup_u = std::max(out.sup_u, a);
  out.bernstein_cap = std::sqrt(support / Ln) * f2;
  out.bernstein_constant = std::sqrt(support / Ln) / std::pow(R, n / 2.0);
  out.cap_violated = out.sup_u > out.bernstein_cap * (1.0 + 1e-9);

  std::vector<double> levels(lambdas.begin(), lambdas.end());
  if (levels.empty())
    for (int i = 0; i < 48; ++i) levels.push_back(out.sup_u * std::exp2(-0.25 * i));
  const double scale = std::pow(R, n - frostman.alpha) * frostman.constant_estimate * f2 * f2;
  std::vector<std::pair<double, double>> sorted;  // amplitude, weight
  for (std::size_t j = 0; j < nu.size(); ++j) sorted.emplace_back(amp[j], nu.weight(j));
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> tail(sorted.size() + 1, 0.0);  // tail[i] = mass of sorted[i..]
  for (std::size_t i = sorted.size(); i-- > 0;) tail[i] = tail[i + 1] + sorted[i].second;
  auto level_mass = [&](double lam) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), std::make_pair(lam, -1.0));
    return tail[static_cast<std::size_t>(it - sorted.begin())];
  };
  for (double lam : levels) {
    WeakTypeRow row;
    row.lambda = lam;
    row.level_mass = level_mass(lam);
    row.constant = scale > 0.0 ? lam * lam * row.level_mass / scale : 0.0;
    out.worst_constant = std::max(out.worst_constant, row.constant);
    out.rows.push_back(row);
  }

  double direct = 0.0;
  for (const auto& [a, w] : sorted) direct += w * std::pow(a, q);
  const double top = std::min(out.bernstein_cap, out.sup_u);
  const double dl = top / layer_levels;
  double cake = 0.0;
  for (int i = 0; i < layer_levels; ++i) {
    const double lam = (i + 0.5) * dl;
    cake += q * std::pow(lam, q - 1.0) * level_mass(lam) * dl;
  }
  out.lq_direct = std::pow(direct, 1.0 / q);
  out.lq_layer_cake = std::pow(cake, 1.0 / q);
  out.layer_cake_error = out.lq_direct > 0.0 ? std::abs(out.lq_layer_cake - out.lq_direct) / out.lq_direct : 0.0;
  return out;
}

}  // namespace fwlab
