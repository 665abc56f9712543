#pragma once

#include <vector>

#include "fwlab/fourier.hpp"

namespace fwlab {

// Symbol conventions: sqrt(-Delta) multiplies by 2 pi |xi|, -Delta by 4 pi^2 |xi|^2.

/// e^{it sqrt(-Delta)} f.
GridField half_wave(const GridField& f, double t);

/// Phase shift (n-1) pi / 4 used by the cosine propagator.
double cosine_phase(int n);

/// cos(t sqrt(-Delta) - (n-1) pi/4) u0 for real even u0 (n taken from the grid).
/// Throws DomainError when u0 deviates from real/even beyond `tolerance`
/// relative to max |u0|; the output is re-symmetrized.
GridField cosine_wave(const GridField& u0, double t, double tolerance = 1e-10);

/// Spectral d^2/dt^2 of cosine_wave(u0, t).
GridField cosine_wave_dtt(const GridField& u0, double t);

/// (1 - Delta)^{-s/2} f.
GridField bessel_potential(const GridField& f, double s);
/// ||(1 - Delta)^{s/2} f||_2 computed on the spectrum.
double sobolev_norm(const GridField& f, double s);

enum class ZeroMode { project, reject };

struct FracLaplacianResult {
  GridField field;
  double projected_mean = 0.0;  // torus integral of the removed zero mode
};

/// (-Delta)^power f. For power < 0 the zero mode is projected out (and its
/// integral recorded) or, with ZeroMode::reject, a nonzero mean is an error.
FracLaplacianResult frac_laplacian(const GridField& f, double power, ZeroMode mode = ZeroMode::project);

GridField laplacian(const GridField& f);

/// d/dt e^{it sqrt(-Delta)} u0 = i sqrt(-Delta) e^{it sqrt(-Delta)} u0.
GridField time_derivative(const GridField& u0, double t);

/// Components d/dx_j f with multipliers 2 pi i xi_j.
std::vector<GridField> spatial_gradient(const GridField& f);

/// Uniform samples t_i = i/(count-1) of [0,1] with trapezoid weights.
struct TimeQuadrature {
  std::vector<double> times;
  std::vector<double> weights;
};
TimeQuadrature trapezoid_times(int count);

}  // namespace fwlab
