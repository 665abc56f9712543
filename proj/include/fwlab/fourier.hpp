#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fwlab/measures.hpp"

namespace fwlab {

using cplx = std::complex<double>;

enum class FieldDomain { space, frequency };

/// Periodic box of side L sampled with N points per axis (N a power of two).
struct GridSpec {
  int n = 2;
  int N = 64;
  double L = 8.0;

  double spacing() const { return L / N; }
  /// Highest resolved frequency N/(2L) (per axis).
  double nyquist() const { return N / (2.0 * L); }
  std::size_t total() const;
};

/// Smallest admissible box side for a measure whose support has the given
/// diameter: 4 * (diameter + 1).
double padded_box_length(double diameter);

/// Complex samples on an n-dimensional periodic grid.
///
/// Storage is FFT order along every axis: index j of an axis sits at the
/// coordinate (j < N/2 ? j : j - N) * L/N in space, and at the frequency
/// (j < N/2 ? j : j - N) / L on the frequency side. Frequency-side values are
/// Fourier-series coefficients c_m with f(x) = sum_m c_m exp(2 pi i x . xi_m).
class GridField {
public:
  GridField() = default;
  GridField(GridSpec grid, FieldDomain domain);
  GridField(GridSpec grid, FieldDomain domain, std::vector<cplx> values);

  const GridSpec& grid() const { return grid_; }
  FieldDomain domain() const { return domain_; }
  std::size_t size() const { return values_.size(); }
  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  /// Signed integer index (-N/2 .. N/2-1) of flat index `flat` along `axis`.
  int signed_index(std::size_t flat, int axis) const;

private:
  GridSpec grid_;
  FieldDomain domain_ = FieldDomain::space;
  std::vector<cplx> values_;
};

/// Unnormalized-in-space, coefficient-normalized-in-frequency transforms:
/// to_frequency returns c_m = N^-n * sum_j f_j exp(-2 pi i j.m/N).
GridField to_frequency(const GridField& f);
GridField to_space(const GridField& c);

/// Frequency vector of flat index i (length n) and its modulus.
void frequency_of(const GridSpec& grid, std::size_t flat, double* xi);
double frequency_modulus(const GridSpec& grid, std::size_t flat);

/// Multiply the spectrum by m(|xi|) and return to space.
GridField apply_radial_multiplier(const GridField& f, const std::function<cplx(double)>& m);
/// Multiply the spectrum by m(xi, |xi|) and return to space.
GridField apply_multiplier(const GridField& f, const std::function<cplx(std::span<const double>, double)>& m);

/// L^2 norm over the torus, sqrt(h^n sum |f_j|^2).
double l2_norm(const GridField& f);
/// L^1 norm over the torus.
double l1_norm(const GridField& f);
double sup_norm(const GridField& f);
/// Torus integral h^n sum f_j.
cplx integral(const GridField& f);
/// Real inner product Re <f, g> over the torus.
double inner_product(const GridField& f, const GridField& g);

/// Replace samples by their real part and symmetrize f(x) <- (f(x) + f(-x))/2.
GridField enforce_real_even(const GridField& f);
/// max |Im f| / max |f| and max |f(x) - f(-x)| / max |f|.
double imaginary_fraction(const GridField& f);
double oddness_fraction(const GridField& f);

/// Truncated Fourier series evaluated exactly at arbitrary points, using every
/// coefficient with |c_m| above `relative_floor * max|c|`.
std::vector<cplx> evaluate_at(const GridField& f, std::span<const double> points, double relative_floor = 1e-15);

/// Direct-sum transform sum_j w_j exp(-2 pi i x_j . xi) at each frequency.
std::vector<cplx> measure_ft_complex(const AtomicMeasure& mu, std::span<const double> xi_points);
/// sum_j w_j cos(2 pi x_j . xi); for even measures this is the full transform.
/// Non-even input still returns the cosine sum (the real part).
std::vector<double> measure_ft(const AtomicMeasure& mu, std::span<const double> xi_points);

/// Grid spectrum of the measure restricted to |xi| <= cutoff: c_m = L^-n mu^(xi_m).
GridField measure_spectrum(const AtomicMeasure& mu, const GridSpec& grid, double cutoff);

/// Smooth radial profile: 1 on [0,1/2], 0 beyond 1, exp-glued in between.
class BumpProfile {
public:
  double operator()(double r) const;
  double plateau() const { return 0.5; }
  double support() const { return 1.0; }
};

BumpProfile standard_bump();

/// Band window at |xi| = rho: phi(rho) for k = 0, phi(2^-k rho) - phi(2^-k+1 rho) for k >= 1.
double band_window(int k, double rho);

struct LittlewoodPaleyPiece {
  int k = 0;
  GridField field;  // spatial samples of mu_k
  double parent_mass = 0.0;
};

/// Dyadic pieces mu_0..mu_K of the measure on the grid. Throws ParameterError
/// naming the first band whose outer radius 2^k reaches the Nyquist frequency.
std::vector<LittlewoodPaleyPiece> lp_decompose(const AtomicMeasure& mu, int k_max, const GridSpec& grid);
/// Single band of the decomposition, from a precomputed measure spectrum.
LittlewoodPaleyPiece lp_piece(const GridField& measure_spec, int k, double parent_mass, bool even);
/// Spatial samples of the low-pass field with spectrum phi(2^-K |xi|) mu^(xi).
GridField lowpass_field(const AtomicMeasure& mu, int k_max, const GridSpec& grid);

struct L2InterpolationReport {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  bool cauchy_schwarz_holds = false;
  double cauchy_schwarz_slack = 0.0;  // l2 / sqrt(l1*linf), <= 1
  double growth_ratio = 0.0;          // l2 / (2^((n-alpha)k/2) mass^1/2 [mu]^1/2)
};

L2InterpolationReport piece_l2_interpolation_check(const LittlewoodPaleyPiece& piece, double mu_mass,
                                                   const FrostmanReport& frostman);

/// Mollified measure mu_R: spectrum phi(|xi|/(4R)) mu^(xi), i.e. the window
/// equal to one on |xi| <= 2R and vanishing beyond 4R.
GridField mollify_measure(const AtomicMeasure& mu, double R, const GridSpec& grid);

struct MollifierBound {
  double sup = 0.0;
  double constant = 0.0;  // sup / ([mu]_alpha R^(n-alpha))
  double integral = 0.0;
};
MollifierBound mollifier_bound(const GridField& mu_R, const FrostmanReport& frostman, double R);

}  // namespace fwlab
