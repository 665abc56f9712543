#include "fwlab/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fwlab/error.hpp"
#include "fwlab/gemm.hpp"

namespace fwlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

void validate_grid(const GridSpec& g) {
  if (g.n < 1 || g.n > 3) throw ParameterError("grid dimension must be 1, 2 or 3");
  if (!is_power_of_two(g.N) || g.N < 4) throw ParameterError("samples per axis must be a power of two >= 4");
  if (!(g.L > 0.0)) throw ParameterError("box length must be positive");
}

int signed_of(int j, int N) { return j < N / 2 ? j : j - N; }

// exp(sign * 2 pi i * x * m / L), with the product reduced mod 1 before scaling.
cplx unit_phase(double x, int m, double L, double sign) {
  double t = x * m / L;
  t -= std::round(t);
  const double a = sign * kTwoPi * t;
  return {std::cos(a), std::sin(a)};
}

GridField transform(const GridField& in, int direction) {
  const GridSpec& g = in.grid();
  std::vector<int> dims(g.n, g.N);
  GridField out(g, direction == FFTW_FORWARD ? FieldDomain::frequency : FieldDomain::space);
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.values().data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.values().data());
  fftw_plan plan = fftw_plan_dft(g.n, dims.data(), src, dst, direction, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  if (direction == FFTW_FORWARD) {
    const double scale = 1.0 / static_cast<double>(g.total());
    for (auto& v : out.values()) v *= scale;
  }
  return out;
}

}  // namespace

std::size_t GridSpec::total() const {
  std::size_t t = 1;
  for (int a = 0; a < n; ++a) t *= static_cast<std::size_t>(N);
  return t;
}

double padded_box_length(double diameter) { return 4.0 * (diameter + 1.0); }

GridField::GridField(GridSpec grid, FieldDomain domain) : grid_(grid), domain_(domain) {
  validate_grid(grid_);
  values_.assign(grid_.total(), cplx{0.0, 0.0});
}

GridField::GridField(GridSpec grid, FieldDomain domain, std::vector<cplx> values)
    : grid_(grid), domain_(domain), values_(std::move(values)) {
  validate_grid(grid_);
  if (values_.size() != grid_.total()) throw ParameterError("grid field value count mismatch");
}

int GridField::signed_index(std::size_t flat, int axis) const {
  std::size_t stride = 1;
  for (int a = grid_.n - 1; a > axis; --a) stride *= static_cast<std::size_t>(grid_.N);
  const int j = static_cast<int>((flat / stride) % static_cast<std::size_t>(grid_.N));
  return signed_of(j, grid_.N);
}

GridField to_frequency(const GridField& f) {
  if (f.domain() != FieldDomain::space) throw DomainError("to_frequency expects a spatial field");
  return transform(f, FFTW_FORWARD);
}

GridField to_space(const GridField& c) {
  if (c.domain() != FieldDomain::frequency) throw DomainError("to_space expects a frequency field");
  return transform(c, FFTW_BACKWARD);
}

void frequency_of(const GridSpec& g, std::size_t flat, double* xi) {
  for (int a = g.n - 1; a >= 0; --a) {
    const int j = static_cast<int>(flat % static_cast<std::size_t>(g.N));
    flat /= static_cast<std::size_t>(g.N);
    xi[a] = signed_of(j, g.N) / g.L;
  }
}

double frequency_modulus(const GridSpec& g, std::size_t flat) {
  double xi[3];
  frequency_of(g, flat, xi);
  double s = 0.0;
  for (int a = 0; a < g.n; ++a) s += xi[a] * xi[a];
  return std::sqrt(s);
}

GridField apply_radial_multiplier(const GridField& f, const std::function<cplx(double)>& m) {
  GridField c = f.domain() == FieldDomain::space ? to_frequency(f) : f;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= m(frequency_modulus(c.grid(), i));
  return to_space(c);
}

GridField apply_multiplier(const GridField& f, const std::function<cplx(std::span<const double>, double)>& m) {
  GridField c = f.domain() == FieldDomain::space ? to_frequency(f) : f;
  const int n = c.grid().n;
  double xi[3];
  for (std::size_t i = 0; i < c.size(); ++i) {
    frequency_of(c.grid(), i, xi);
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += xi[a] * xi[a];
    c[i] *= m(std::span<const double>(xi, static_cast<std::size_t>(n)), std::sqrt(s));
  }
  return to_space(c);
}

namespace {
double cell_volume(const GridSpec& g) { return std::pow(g.spacing(), g.n); }
}  // namespace

double l2_norm(const GridField& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  return std::sqrt(s * cell_volume(f.grid()));
}

double l1_norm(const GridField& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::abs(v);
  return s * cell_volume(f.grid());
}

double sup_norm(const GridField& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s = std::max(s, std::abs(v));
  return s;
}

cplx integral(const GridField& f) {
  cplx s{0.0, 0.0};
  for (const auto& v : f.values()) s += v;
  return s * cell_volume(f.grid());
}

double inner_product(const GridField& f, const GridField& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += (f[i] * std::conj(g[i])).real();
  return s * cell_volume(f.grid());
}

namespace {

// Flat index of the point reflected through the origin.
std::size_t reflected(const GridSpec& g, std::size_t flat) {
  std::size_t out = 0, stride = 1;
  for (int a = g.n - 1; a >= 0; --a) {
    const std::size_t j = flat % static_cast<std::size_t>(g.N);
    flat /= static_cast<std::size_t>(g.N);
    const std::size_t r = (static_cast<std::size_t>(g.N) - j) % static_cast<std::size_t>(g.N);
    out += r * stride;
    stride *= static_cast<std::size_t>(g.N);
  }
  return out;
}

}  // namespace

GridField enforce_real_even(const GridField& f) {
  GridField out(f.grid(), f.domain());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = 0.5 * (f[i].real() + f[reflected(f.grid(), i)].real());
    out[i] = {v, 0.0};
  }
  return out;
}

double imaginary_fraction(const GridField& f) {
  double im = 0.0, mx = 0.0;
  for (const auto& v : f.values()) {
    im = std::max(im, std::abs(v.imag()));
    mx = std::max(mx, std::abs(v));
  }
  return mx > 0.0 ? im / mx : 0.0;
}

double oddness_fraction(const GridField& f) {
  double odd = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    odd = std::max(odd, std::abs(f[i] - f[reflected(f.grid(), i)]));
    mx = std::max(mx, std::abs(f[i]));
  }
  return mx > 0.0 ? odd / mx : 0.0;
}

std::vector<cplx> evaluate_at(const GridField& f, std::span<const double> points, double relative_floor) {
  const GridField c = f.domain() == FieldDomain::space ? to_frequency(f) : f;
  const GridSpec& g = c.grid();
  const int n = g.n;
  if (points.size() % static_cast<std::size_t>(n) != 0) throw ParameterError("point buffer not a multiple of n");

  double cmax = 0.0;
  for (const auto& v : c.values()) cmax = std::max(cmax, std::abs(v));
  const double floor = relative_floor * cmax;
  std::vector<int> idx;
  std::vector<cplx> coef;
  int reach = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (cmax == 0.0 || std::abs(c[i]) <= floor) continue;
    for (int a = 0; a < n; ++a) {
      const int s = c.signed_index(i, a);
      idx.push_back(s);
      reach = std::max(reach, std::abs(s));
    }
    coef.push_back(c[i]);
  }

  const std::size_t count = points.size() / static_cast<std::size_t>(n);
  std::vector<cplx> out(count, cplx{0.0, 0.0});
  const int width = 2 * reach + 1;
  std::vector<cplx> table(static_cast<std::size_t>(n) * width);
  for (std::size_t p = 0; p < count; ++p) {
    for (int a = 0; a < n; ++a)
      for (int m = -reach; m <= reach; ++m)
        table[a * width + (m + reach)] = unit_phase(points[p * n + a], m, g.L, 1.0);
    cplx acc{0.0, 0.0};
    for (std::size_t q = 0; q < coef.size(); ++q) {
      cplx ph = table[idx[q * n] + reach];
      for (int a = 1; a < n; ++a) ph *= table[a * width + idx[q * n + a] + reach];
      acc += coef[q] * ph;
    }
    out[p] = acc;
  }
  return out;
}

std::vector<cplx> measure_ft_complex(const AtomicMeasure& mu, std::span<const double> xi_points) {
  const int n = mu.dimension();
  if (xi_points.size() % static_cast<std::size_t>(n) != 0) throw ParameterError("frequency buffer not a multiple of n");
  const std::size_t count = xi_points.size() / static_cast<std::size_t>(n);
  std::vector<cplx> out(count);
  for (std::size_t q = 0; q < count; ++q) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      double t = 0.0;
      for (int a = 0; a < n; ++a) t += mu.positions()[j * n + a] * xi_points[q * n + a];
      t -= std::round(t);
      re += mu.weight(j) * std::cos(kTwoPi * t);
      im -= mu.weight(j) * std::sin(kTwoPi * t);
    }
    out[q] = {re, im};
  }
  return out;
}

std::vector<double> measure_ft(const AtomicMeasure& mu, std::span<const double> xi_points) {
  const int n = mu.dimension();
  if (xi_points.size() % static_cast<std::size_t>(n) != 0) throw ParameterError("frequency buffer not a multiple of n");
  const std::size_t count = xi_points.size() / static_cast<std::size_t>(n);
  std::vector<double> out(count);
  for (std::size_t q = 0; q < count; ++q) {
    double re = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      double t = 0.0;
      for (int a = 0; a < n; ++a) t += mu.positions()[j * n + a] * xi_points[q * n + a];
      t -= std::round(t);
      re += mu.weight(j) * std::cos(kTwoPi * t);
    }
    out[q] = re;
  }
  return out;
}

GridField measure_spectrum(const AtomicMeasure& mu, const GridSpec& grid, double cutoff) {
  validate_grid(grid);
  if (mu.dimension() != grid.n) throw ParameterError("measure and grid dimensions differ");
  const int n = grid.n;
  const int mcap = std::min(grid.N / 2 - 1, static_cast<int>(std::floor(cutoff * grid.L)));
  const std::size_t width = static_cast<std::size_t>(2 * mcap + 1);
  std::size_t rest = 1;
  for (int a = 1; a < n; ++a) rest *= width;

  // C(m0, rest) = sum_j A(m0, j) B(j, rest) with the atom loop blocked.
  std::vector<cplx> C(width * rest, cplx{0.0, 0.0});
  const std::size_t chunk = std::max<std::size_t>(1, std::min<std::size_t>(4096, (1u << 22) / std::max(width, rest)));
  std::vector<cplx> A, B;
  const double norm = std::pow(grid.L, -n);
  for (std::size_t j0 = 0; j0 < mu.size(); j0 += chunk) {
    const std::size_t nj = std::min(chunk, mu.size() - j0);
    A.assign(width * nj, cplx{});
    B.assign(nj * rest, cplx{});
    for (std::size_t jj = 0; jj < nj; ++jj) {
      const auto x = mu.point(j0 + jj);
      for (int m = -mcap; m <= mcap; ++m) A[(m + mcap) * nj + jj] = unit_phase(x[0], m, grid.L, -1.0);
      std::vector<cplx> row(rest, cplx{mu.weight(j0 + jj) * norm, 0.0});
      std::size_t span_len = 1;
      for (int a = 1; a < n; ++a) {
        // Expand row over axis a: row[(prefix)*width + m] = row[prefix] * phase_a(m).
        std::vector<cplx> ph(width);
        for (int m = -mcap; m <= mcap; ++m) ph[m + mcap] = unit_phase(x[a], m, grid.L, -1.0);
        std::vector<cplx> next(span_len * width);
        for (std::size_t p = 0; p < span_len; ++p)
          for (std::size_t m = 0; m < width; ++m) next[p * width + m] = row[p] * ph[m];
        span_len *= width;
        std::copy(next.begin(), next.end(), row.begin());
      }
      std::copy(row.begin(), row.end(), B.begin() + jj * rest);
    }
    blas::zgemm(width, rest, nj, {1.0, 0.0}, A.data(), B.data(), {1.0, 0.0}, C.data());
  }

  GridField spec(grid, FieldDomain::frequency);
  const double cut2 = cutoff * cutoff;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    std::size_t pos = 0;
    bool inside = true;
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const int s = spec.signed_index(i, a);
      if (std::abs(s) > mcap) {
        inside = false;
        break;
      }
      r2 += (s / grid.L) * (s / grid.L);
      pos = pos * width + static_cast<std::size_t>(s + mcap);
    }
    if (inside && r2 <= cut2) spec[i] = C[pos];
  }
  return spec;
}

double BumpProfile::operator()(double r) const {
  const double a = std::abs(r);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  const double s = (a - 0.5) / 0.5;  // in (0,1)
  const double up = std::exp(-1.0 / (1.0 - s));
  const double down = std::exp(-1.0 / s);
  return up / (up + down);
}

BumpProfile standard_bump() { return {}; }

double band_window(int k, double rho) {
  const BumpProfile phi;
  if (k == 0) return phi(rho);
  return phi(std::ldexp(rho, -k)) - phi(std::ldexp(rho, -k + 1));
}

LittlewoodPaleyPiece lp_piece(const GridField& measure_spec, int k, double parent_mass, bool even) {
  GridField c = measure_spec;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= band_window(k, frequency_modulus(c.grid(), i));
  GridField f = to_space(c);
  if (even) f = enforce_real_even(f);
  return {k, std::move(f), parent_mass};
}

std::vector<LittlewoodPaleyPiece> lp_decompose(const AtomicMeasure& mu, int k_max, const GridSpec& grid) {
  if (k_max < 0) throw ParameterError("k_max must be nonnegative");
  for (int k = 0; k <= k_max; ++k)
    if (std::ldexp(1.0, k) >= grid.nyquist())
      throw ParameterError("band k=" + std::to_string(k) + " reaches the grid Nyquist frequency " +
                           std::to_string(grid.nyquist()));
  const GridField spec = measure_spectrum(mu, grid, std::ldexp(1.0, k_max));
  std::vector<LittlewoodPaleyPiece> pieces;
  pieces.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) pieces.push_back(lp_piece(spec, k, mu.total_mass(), mu.is_even()));
  return pieces;
}

GridField lowpass_field(const AtomicMeasure& mu, int k_max, const GridSpec& grid) {
  if (std::ldexp(1.0, k_max) >= grid.nyquist()) throw ParameterError("low-pass cutoff reaches the Nyquist frequency");
  GridField c = measure_spectrum(mu, grid, std::ldexp(1.0, k_max));
  const BumpProfile phi;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= phi(std::ldexp(frequency_modulus(c.grid(), i), -k_max));
  GridField f = to_space(c);
  return mu.is_even() ? enforce_real_even(f) : f;
}

L2InterpolationReport piece_l2_interpolation_check(const LittlewoodPaleyPiece& piece, double mu_mass,
                                                   const FrostmanReport& frostman) {
  L2InterpolationReport r;
  r.l1 = l1_norm(piece.field);
  r.l2 = l2_norm(piece.field);
  r.linf = sup_norm(piece.field);
  const double bound = std::sqrt(r.l1 * r.linf);
  r.cauchy_schwarz_slack = bound > 0.0 ? r.l2 / bound : 0.0;
  r.cauchy_schwarz_holds = r.l2 <= bound * (1.0 + 1e-12);
  const int n = piece.field.grid().n;
  const double scale = std::pow(2.0, (n - frostman.alpha) * piece.k / 2.0);
  r.growth_ratio = r.l2 / (scale * std::sqrt(mu_mass * frostman.constant_estimate));
  return r;
}

GridField mollify_measure(const AtomicMeasure& mu, double R, const GridSpec& grid) {
  if (!(R > 0.0)) throw ParameterError("mollifier scale must be positive");
  if (4.0 * R >= grid.nyquist()) throw ParameterError("mollifier support 4R reaches the Nyquist frequency");
  GridField c = measure_spectrum(mu, grid, 4.0 * R);
  const BumpProfile phi;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= phi(frequency_modulus(c.grid(), i) / (4.0 * R));
  GridField f = to_space(c);
  return mu.is_even() ? enforce_real_even(f) : f;
}

MollifierBound mollifier_bound(const GridField& mu_R, const FrostmanReport& frostman, double R) {
  MollifierBound b;
  b.sup = sup_norm(mu_R);
  b.integral = integral(mu_R).real();
  const int n = mu_R.grid().n;
  b.constant = b.sup / (frostman.constant_estimate * std::pow(R, n - frostman.alpha));
  return b;
}

}  // namespace fwlab
