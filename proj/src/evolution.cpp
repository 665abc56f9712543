#include "fwlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fwlab/error.hpp"
#include "fwlab/gemm.hpp"
#include "fwlab/wave.hpp"

namespace fwlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kBlockBudget = std::size_t{1} << 22;

cplx unit_phase(double x, int m, double L) {
  double t = x * m / L;
  t -= std::round(t);
  return std::polar(1.0, kTwoPi * t);
}

cplx multiplier(Propagator prop, double rho, double t, double shift) {
  const double w = kTwoPi * rho;
  switch (prop) {
    case Propagator::identity: return {1.0, 0.0};
    case Propagator::half_wave: return std::polar(1.0, w * t);
    case Propagator::cosine: return {std::cos(w * t - shift), 0.0};
    case Propagator::half_wave_dt: return cplx{0.0, w} * std::polar(1.0, w * t);
    case Propagator::cosine_dt: return {-w * std::sin(w * t - shift), 0.0};
  }
  return {0.0, 0.0};
}

bool real_multiplier(Propagator prop) {
  return prop == Propagator::identity || prop == Propagator::cosine || prop == Propagator::cosine_dt;
}

// Flat index of -m, or npos when some component sits at -N/2.
std::size_t partner(const GridField& c, std::size_t flat) {
  const GridSpec& g = c.grid();
  std::size_t out = 0;
  for (int a = 0; a < g.n; ++a) {
    const int s = c.signed_index(flat, a);
    if (s == -g.N / 2) return static_cast<std::size_t>(-1);
    const int ms = -s;
    out = out * g.N + static_cast<std::size_t>(ms < 0 ? ms + g.N : ms);
  }
  return out;
}

bool first_positive(const GridField& c, std::size_t flat) {
  for (int a = 0; a < c.grid().n; ++a) {
    const int s = c.signed_index(flat, a);
    if (s != 0) return s > 0;
  }
  return false;
}
}  // namespace

double ModeSet::max_rho() const {
  double r = 0.0;
  for (double v : rho) r = std::max(r, v);
  return r;
}

ModeSet collect_modes(const GridField& f, double relative_floor) {
  const GridField c = f.domain() == FieldDomain::space ? to_frequency(f) : f;
  const GridSpec& g = c.grid();
  ModeSet out;
  out.n = g.n;
  out.L = g.L;

  double cmax = 0.0;
  for (const auto& v : c.values()) cmax = std::max(cmax, std::abs(v));
  if (cmax == 0.0) return out;
  const double floor = relative_floor * cmax;
  const double tol = 1e-12 * cmax;

  bool paired = true;
  for (std::size_t i = 0; i < c.size() && paired; ++i) {
    if (std::abs(c[i]) <= floor) continue;
    const std::size_t j = partner(c, i);
    if (j == static_cast<std::size_t>(-1) || std::abs(c[i].imag()) > tol || std::abs(c[i] - c[j]) > tol)
      paired = false;
  }
  out.paired = paired;

  struct Entry {
    long long key;
    std::size_t flat;
    cplx coef;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (std::abs(c[i]) <= floor) continue;
    cplx coef = c[i];
    if (paired) {
      const bool zero = frequency_modulus(g, i) == 0.0;
      if (!zero && !first_positive(c, i)) continue;
      coef = {zero ? c[i].real() : 2.0 * c[i].real(), 0.0};
    }
    long long key = 0;
    for (int a = 0; a < g.n; ++a) key += static_cast<long long>(c.signed_index(i, a)) * c.signed_index(i, a);
    entries.push_back({key, i, coef});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.key < y.key; });
  for (std::size_t e = 0; e < entries.size(); ++e) {
    if (e == 0 || entries[e].key != entries[e - 1].key) out.shell_start.push_back(e);
    for (int a = 0; a < g.n; ++a) out.index.push_back(c.signed_index(entries[e].flat, a));
    out.rho.push_back(std::sqrt(static_cast<double>(entries[e].key)) / g.L);
    out.coef.push_back(entries[e].coef);
  }
  out.shell_start.push_back(entries.size());
  return out;
}

namespace {
std::vector<cplx> evolve_block(const ModeSet& modes, Propagator prop, std::span<const double> points,
                               std::span<const double> times) {
  const int n = modes.n;
  const std::size_t P = points.size() / n;
  const std::size_t T = times.size();
  const std::size_t S = modes.shells();
  std::vector<cplx> out(P * T, cplx{0.0, 0.0});
  if (P == 0 || T == 0 || S == 0) return out;

  int reach = 0;
  for (int s : modes.index) reach = std::max(reach, std::abs(s));
  const int width = 2 * reach + 1;
  std::vector<cplx> table(static_cast<std::size_t>(P) * n * width);
  for (std::size_t p = 0; p < P; ++p)
    for (int a = 0; a < n; ++a)
      for (int m = -reach; m <= reach; ++m)
        table[(p * n + a) * width + (m + reach)] = unit_phase(points[p * n + a], m, modes.L);

  const double shift = cosine_phase(n);
  const std::size_t chunk = std::clamp<std::size_t>(std::min(kBlockBudget / P, kBlockBudget / T), 64, S);
  const bool real_d = real_multiplier(prop);

  // Shell sums A_s(x_p) = sum over the shell of coef * e^{2 pi i x_p . xi}, for shells [s0, s0 + c).
  auto shell_sums = [&](std::size_t s0, std::size_t c, auto&& store) {
    for (std::size_t p = 0; p < P; ++p) {
      const cplx* row = &table[p * n * width];
      for (std::size_t s = 0; s < c; ++s) {
        cplx acc{0.0, 0.0};
        for (std::size_t q = modes.shell_start[s0 + s]; q < modes.shell_start[s0 + s + 1]; ++q) {
          const int* idx = &modes.index[q * n];
          cplx ph = row[idx[0] + reach];
          for (int a = 1; a < n; ++a) ph *= row[a * width + idx[a] + reach];
          acc += modes.coef[q] * ph;
        }
        store(p * c + s, acc);
      }
    }
  };
  auto shell_rho = [&](std::size_t s) { return modes.rho[modes.shell_start[s]]; };

  if (modes.paired) {
    std::vector<double> E(P * chunk), Dre(chunk * T), Dim(real_d ? 0 : chunk * T);
    std::vector<double> Ore(P * T, 0.0), Oim(real_d ? 0 : P * T, 0.0);
    for (std::size_t s0 = 0; s0 < S; s0 += chunk) {
      const std::size_t c = std::min(chunk, S - s0);
      shell_sums(s0, c, [&](std::size_t i, cplx v) { E[i] = v.real(); });
      for (std::size_t s = 0; s < c; ++s)
        for (std::size_t t = 0; t < T; ++t) {
          const cplx v = multiplier(prop, shell_rho(s0 + s), times[t], shift);
          Dre[s * T + t] = v.real();
          if (!real_d) Dim[s * T + t] = v.imag();
        }
      blas::dgemm(P, T, c, 1.0, E.data(), Dre.data(), 1.0, Ore.data());
      if (!real_d) blas::dgemm(P, T, c, 1.0, E.data(), Dim.data(), 1.0, Oim.data());
    }
    for (std::size_t i = 0; i < P * T; ++i) out[i] = {Ore[i], real_d ? 0.0 : Oim[i]};
    return out;
  }

  std::vector<cplx> E(P * chunk), D(chunk * T);
  for (std::size_t s0 = 0; s0 < S; s0 += chunk) {
    const std::size_t c = std::min(chunk, S - s0);
    shell_sums(s0, c, [&](std::size_t i, cplx v) { E[i] = v; });
    for (std::size_t s = 0; s < c; ++s)
      for (std::size_t t = 0; t < T; ++t) D[s * T + t] = multiplier(prop, shell_rho(s0 + s), times[t], shift);
    blas::zgemm(P, T, c, cplx{1.0, 0.0}, E.data(), D.data(), cplx{1.0, 0.0}, out.data());
  }
  return out;
}
}  // namespace

std::vector<cplx> evolve_at(const ModeSet& modes, Propagator prop, std::span<const double> points,
                            std::span<const double> times) {
  const int n = modes.n;
  if (n < 1) return std::vector<cplx>(points.size() * times.size(), cplx{0.0, 0.0});
  if (points.size() % static_cast<std::size_t>(n) != 0) throw ParameterError("point buffer not a multiple of n");
  constexpr std::size_t kPointBlock = 1024;
  const std::size_t P = points.size() / n;
  if (P <= kPointBlock) return evolve_block(modes, prop, points, times);
  std::vector<cplx> out;
  out.reserve(P * times.size());
  for (std::size_t p0 = 0; p0 < P; p0 += kPointBlock) {
    const std::size_t c = std::min(kPointBlock, P - p0);
    const auto part = evolve_block(modes, prop, points.subspan(p0 * n, c * n), times);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace fwlab
