#include "fwlab/wave.hpp"

#include <cmath>
#include <numbers>

#include "fwlab/error.hpp"

namespace fwlab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

GridField half_wave(const GridField& f, double t) {
  return apply_radial_multiplier(f, [t](double rho) { return std::polar(1.0, kTwoPi * t * rho); });
}

double cosine_phase(int n) { return (n - 1) * kPi / 4.0; }

GridField cosine_wave(const GridField& u0, double t, double tolerance) {
  if (u0.domain() != FieldDomain::space) throw DomainError("cosine_wave expects spatial initial data");
  if (imaginary_fraction(u0) > tolerance || oddness_fraction(u0) > tolerance)
    throw DomainError("cosine_wave requires real and even initial data");
  const double shift = cosine_phase(u0.grid().n);
  GridField u = apply_radial_multiplier(u0, [t, shift](double rho) { return cplx{std::cos(kTwoPi * t * rho - shift), 0.0}; });
  return enforce_real_even(u);
}

GridField cosine_wave_dtt(const GridField& u0, double t) {
  const double shift = cosine_phase(u0.grid().n);
  return apply_radial_multiplier(u0, [t, shift](double rho) {
    const double w = kTwoPi * rho;
    return cplx{-w * w * std::cos(kTwoPi * t * rho - shift), 0.0};
  });
}

GridField bessel_potential(const GridField& f, double s) {
  return apply_radial_multiplier(
      f, [s](double rho) { return cplx{std::pow(1.0 + 4.0 * kPi * kPi * rho * rho, -s / 2.0), 0.0}; });
}

double sobolev_norm(const GridField& f, double s) {
  const GridField c = f.domain() == FieldDomain::space ? to_frequency(f) : f;
  double acc = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double rho = frequency_modulus(c.grid(), i);
    acc += std::pow(1.0 + 4.0 * kPi * kPi * rho * rho, s) * std::norm(c[i]);
  }
  return std::sqrt(acc * std::pow(c.grid().L, c.grid().n));
}

FracLaplacianResult frac_laplacian(const GridField& f, double power, ZeroMode mode) {
  GridField c = f.domain() == FieldDomain::space ? to_frequency(f) : f;
  FracLaplacianResult out;
  const double volume = std::pow(c.grid().L, c.grid().n);
  if (power < 0.0) {
    double cmax = 0.0;
    for (const auto& v : c.values()) cmax = std::max(cmax, std::abs(v));
    if (mode == ZeroMode::reject && std::abs(c[0]) > 1e-12 * cmax)
      throw DomainError("negative Laplacian power applied to a field with nonzero mean");
    out.projected_mean = (c[0] * volume).real();
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double rho = frequency_modulus(c.grid(), i);
    if (rho == 0.0) {
      c[i] = power == 0.0 ? c[i] : cplx{0.0, 0.0};
      continue;
    }
    c[i] *= std::pow(4.0 * kPi * kPi * rho * rho, power);
  }
  out.field = to_space(c);
  return out;
}

GridField laplacian(const GridField& f) {
  return apply_radial_multiplier(f, [](double rho) { return cplx{-4.0 * kPi * kPi * rho * rho, 0.0}; });
}

GridField time_derivative(const GridField& u0, double t) {
  return apply_radial_multiplier(
      u0, [t](double rho) { return cplx{0.0, kTwoPi * rho} * std::polar(1.0, kTwoPi * t * rho); });
}

std::vector<GridField> spatial_gradient(const GridField& f) {
  const GridField c = f.domain() == FieldDomain::space ? to_frequency(f) : f;
  std::vector<GridField> out;
  for (int a = 0; a < c.grid().n; ++a)
    out.push_back(apply_multiplier(c, [a](std::span<const double> xi, double) { return cplx{0.0, kTwoPi * xi[a]}; }));
  return out;
}

TimeQuadrature trapezoid_times(int count) {
  if (count < 2) throw ParameterError("trapezoid time grid needs at least 2 samples");
  TimeQuadrature q;
  const double h = 1.0 / (count - 1);
  for (int i = 0; i < count; ++i) {
    q.times.push_back(i * h);
    q.weights.push_back((i == 0 || i == count - 1) ? h / 2.0 : h);
  }
  return q;
}

}  // namespace fwlab
