#include "fwlab/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fwlab/error.hpp"
#include "fwlab/evolution.hpp"

namespace fwlab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr std::size_t kPairBudget = std::size_t{1} << 27;
constexpr std::size_t kTile = 256;

double pair_distance(const AtomicMeasure& mu, std::size_t i, std::size_t j) {
  const int n = mu.dimension();
  const double* x = mu.positions().data();
  double d2 = 0.0;
  for (int a = 0; a < n; ++a) {
    const double d = x[i * n + a] - x[j * n + a];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

double max_pair_distance(const AtomicMeasure& mu) {
  double m = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = i + 1; j < mu.size(); ++j) m = std::max(m, pair_distance(mu, i, j));
  return m;
}

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}
}  // namespace

double DistanceDensity::max_density() const {
  double m = 0.0;
  for (std::size_t b = 0; b < masses.size(); ++b) m = std::max(m, masses[b] / (bin_edges[b + 1] - bin_edges[b]));
  return m;
}

std::string DistanceDensity::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "bin_center,mass,density\n";
  for (std::size_t b = 0; b < masses.size(); ++b) {
    const double width = bin_edges[b + 1] - bin_edges[b];
    os << 0.5 * (bin_edges[b] + bin_edges[b + 1]) << ',' << masses[b] << ',' << masses[b] / width << '\n';
  }
  return os.str();
}

DistanceDensity pushforward(const AtomicMeasure& mu, double lambda, int bins, double range) {
  if (bins < 1) throw ParameterError("pushforward needs at least one bin");
  if (!std::isfinite(lambda)) throw ParameterError("pushforward weight exponent must be finite");
  const std::size_t P = mu.size();
  if (P * P > kPairBudget) throw ResourceError("pushforward pair count exceeds the budget");
  if (!(range > 0.0)) range = std::max(max_pair_distance(mu), 1e-300) * (1.0 + 1e-9);

  DistanceDensity out;
  out.lambda = lambda;
  out.masses.assign(bins, 0.0);
  out.bin_edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) out.bin_edges[b] = range * b / bins;

  auto deposit = [&](double d, double mass) {
    if (d == 0.0 && lambda < 0.0) {
      out.skipped_mass += mass;
      ++out.skipped_pairs;
      return;
    }
    if (d >= range) return;
    const double weight = lambda == 0.0 ? mass : mass * std::pow(d, lambda);
    const auto b = std::min<std::size_t>(static_cast<std::size_t>(d / range * bins), bins - 1);
    out.masses[b] += weight;
  };
  // Diagonal, then each unordered pair counted twice, in fixed tile order.
  for (std::size_t i = 0; i < P; ++i) deposit(0.0, mu.weight(i) * mu.weight(i));
  for (std::size_t i0 = 0; i0 < P; i0 += kTile)
    for (std::size_t j0 = i0; j0 < P; j0 += kTile)
      for (std::size_t i = i0; i < std::min(P, i0 + kTile); ++i)
        for (std::size_t j = std::max(j0, i + 1); j < std::min(P, j0 + kTile); ++j) {
          const double d = pair_distance(mu, i, j);
          deposit(d, 2.0 * mu.weight(i) * mu.weight(j));
        }
  for (double m : out.masses) out.total += m;
  return out;
}

std::array<double, 3> density_refinement(const AtomicMeasure& mu, double lambda, int bins) {
  const double range = std::max(max_pair_distance(mu), 1e-300) * (1.0 + 1e-9);
  return {pushforward(mu, lambda, bins, range).max_density(), pushforward(mu, lambda, 2 * bins, range).max_density(),
          pushforward(mu, lambda, 4 * bins, range).max_density()};
}

double default_lambda(double alpha, int n) {
  const double gap = 2.0 * alpha - (n - 1);
  if (!(gap > 0.0)) throw RangeError("default lambda needs alpha > (n-1)/2");
  return std::max(4.0, std::ceil(2.0 * n / gap - 1e-9));
}

double distance_set_measure(const AtomicMeasure& mu, double r) {
  if (!(r > 0.0)) throw ParameterError("thickening radius must be positive");
  const std::size_t P = mu.size();
  if (P * (P + 1) / 2 > kPairBudget) throw ResourceError("distance set pair count exceeds the budget");
  std::vector<double> d;
  d.reserve(P * (P - 1) / 2 + 1);
  if (P > 0) d.push_back(0.0);
  for (std::size_t i = 0; i < P; ++i)
    for (std::size_t j = i + 1; j < P; ++j) d.push_back(pair_distance(mu, i, j));
  std::sort(d.begin(), d.end());
  double total = 0.0;
  std::size_t i = 0;
  while (i < d.size()) {
    const double lo = d[i] - r;
    double hi = d[i] + r;
    ++i;
    while (i < d.size() && d[i] - r <= hi) hi = d[i++] + r;
    total += hi - lo;
  }
  return total;
}

AtomicMeasure sphere_quadrature(int n, double t, int resolution) {
  if (!(t > 0.0)) throw ParameterError("sphere radius must be positive");
  if (resolution < 2) throw ParameterError("sphere quadrature needs resolution >= 2");
  std::vector<double> pts, w;
  if (n == 2) {
    for (int j = 0; j < resolution; ++j) {
      const double th = 2.0 * kPi * j / resolution;
      pts.push_back(t * std::cos(th));
      pts.push_back(t * std::sin(th));
      w.push_back(2.0 * kPi * t / resolution);
    }
  } else if (n == 3) {
    std::vector<double> z, gw;
    gauss_legendre(resolution, z, gw);
    const int az = 2 * resolution;
    for (int i = 0; i < resolution; ++i) {
      const double s = std::sqrt(1.0 - z[i] * z[i]);
      for (int j = 0; j < az; ++j) {
        const double ph = 2.0 * kPi * (j + 0.5) / az;
        pts.push_back(t * s * std::cos(ph));
        pts.push_back(t * s * std::sin(ph));
        pts.push_back(t * z[i]);
        w.push_back(gw[i] * 2.0 * kPi / az * t * t);
      }
    }
  } else {
    throw ParameterError("sphere quadrature supports n = 2 or 3");
  }
  return AtomicMeasure(n, std::move(pts), std::move(w), false, 2.0 * t);
}

std::vector<double> spherical_convolution(const LittlewoodPaleyPiece& piece, double t, std::span<const double> points,
                                          int resolution) {
  if (!(t > 0.0 && t <= 1.0)) throw ParameterError("spherical convolution radius must lie in (0, 1]");
  const GridSpec& g = piece.field.grid();
  const int n = g.n;
  if (points.size() % static_cast<std::size_t>(n) != 0) throw ParameterError("point buffer not a multiple of n");
  const ModeSet modes = collect_modes(piece.field);
  if (resolution <= 0) resolution = std::max(32, static_cast<int>(std::ceil(2.0 * kPi * t * modes.max_rho())) + 24);
  const AtomicMeasure S = sphere_quadrature(n, t, resolution);

  const std::size_t X = points.size() / n;
  std::vector<double> shifted;
  shifted.reserve(X * S.size() * n);
  for (std::size_t p = 0; p < X; ++p)
    for (std::size_t s = 0; s < S.size(); ++s)
      for (int a = 0; a < n; ++a) shifted.push_back(points[p * n + a] - S.positions()[s * n + a]);
  const double t0 = 0.0;
  const auto v = evolve_at(modes, Propagator::identity, shifted, {&t0, 1});
  std::vector<double> out(X, 0.0);
  for (std::size_t p = 0; p < X; ++p) {
    double acc = 0.0;
    for (std::size_t s = 0; s < S.size(); ++s) acc += S.weight(s) * v[p * S.size() + s].real();
    out[p] = acc;
  }
  return out;
}

MattilaSplitReport mattila_split_check(const LittlewoodPaleyPiece& piece, double t, std::span<const double> points,
                                       double lambda) {
  const int n = piece.field.grid().n;
  const int k = piece.k;
  if (k < 1) throw ParameterError("the split needs a band with k >= 1");
  if (!(lambda > 0.0)) throw ParameterError("the split needs lambda > 0");
  MattilaSplitReport out;
  out.t = t;
  out.window_low = std::exp2(-static_cast<double>(n) * k / lambda);
  if (!(t >= out.window_low && t <= 1.0)) {
    std::ostringstream os;
    os << "t = " << t << " outside the window [" << out.window_low << ", 1]";
    throw ParameterError(os.str());
  }
  out.lhs = spherical_convolution(piece, t, points);

  const double shift = (n - 1) * kPi / 4.0;
  const double h = (n - 1) / 2.0;
  const GridField main_field = apply_radial_multiplier(piece.field, [&](double rho) {
    if (rho == 0.0) return cplx{0.0, 0.0};
    return cplx{2.0 * std::pow(t, h) * std::pow(rho, -h) * std::cos(2.0 * kPi * t * rho - shift), 0.0};
  });
  const GridField cos_field = apply_radial_multiplier(
      piece.field, [&](double rho) { return cplx{std::cos(2.0 * kPi * t * rho - shift), 0.0}; });
  const auto mv = evaluate_at(main_field, points);
  const auto cv = evaluate_at(cos_field, points);
  const double scale = std::exp2(-(n - 1) * k / 2.0) * std::pow(t, h);

  double lhs_max = 0.0, main_max = 0.0, cos_max = 0.0, rem_max = 0.0;
  for (std::size_t p = 0; p < out.lhs.size(); ++p) {
    out.main.push_back(mv[p].real());
    out.scaled_cos.push_back(scale * std::abs(cv[p].real()));
    lhs_max = std::max(lhs_max, std::abs(out.lhs[p]));
    main_max = std::max(main_max, std::abs(out.main[p]));
    cos_max = std::max(cos_max, out.scaled_cos[p]);
    rem_max = std::max(rem_max, std::abs(out.lhs[p] - out.main[p]));
  }
  out.worst_ratio = cos_max + rem_max > 0.0 ? lhs_max / (cos_max + rem_max) : 0.0;
  out.remainder_fraction = main_max > 0.0 ? rem_max / main_max : 0.0;
  out.main_dominates = out.remainder_fraction < 0.5;
  return out;
}

}  // namespace fwlab
