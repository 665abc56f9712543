#pragma once

#include <span>
#include <vector>

#include "fwlab/fourier.hpp"

namespace fwlab {

/// Radial time multipliers M(|xi|, t) applied to a spectrum.
enum class Propagator {
  identity,      // 1
  half_wave,     // e^{2 pi i t |xi|}
  cosine,        // cos(2 pi t |xi| - (n-1) pi/4)
  half_wave_dt,  // d/dt of half_wave
  cosine_dt,     // d/dt of cosine
};

/// Nonzero Fourier coefficients of a grid field, stored sparsely. When the
/// spectrum is real and even the modes are folded to one representative per
/// +-xi pair (coefficient doubled) and `paired` is set. Modes are grouped into
/// shells of equal |m|^2; shell s owns modes [shell_start[s], shell_start[s+1]).
struct ModeSet {
  int n = 0;
  double L = 1.0;
  bool paired = false;
  std::vector<int> index;  // n signed indices per mode
  std::vector<double> rho;
  std::vector<cplx> coef;
  std::vector<std::size_t> shell_start;

  std::size_t size() const { return coef.size(); }
  std::size_t shells() const { return shell_start.empty() ? 0 : shell_start.size() - 1; }
  double max_rho() const;
};

ModeSet collect_modes(const GridField& f, double relative_floor = 1e-14);

/// Values u(x_p, t_q) of the propagated field, row-major (points x times).
/// Exact truncated series, evaluated through blocked matrix products.
std::vector<cplx> evolve_at(const ModeSet& modes, Propagator prop, std::span<const double> points,
                            std::span<const double> times);

}  // namespace fwlab
