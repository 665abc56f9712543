#pragma once

#include <span>
#include <vector>

#include "fwlab/fourier.hpp"
#include "fwlab/measures.hpp"
#include "fwlab/norms.hpp"

namespace fwlab {

/// |d_t u|^2 - |grad u|^2 at time t, for u = e^{it sqrt(-Delta)} u0 (real samples).
GridField null_energy(const GridField& u0, double t);

struct NullIdentityReport {
  double dt = 0.0;               // finite-difference step
  double residual = 0.0;         // max |(d_tt - Delta)|u|^2 - 2 N|
  double scale = 0.0;            // max(|d_tt |u|^2|, |Delta |u|^2|, |2 N|)
  double relative = 0.0;         // residual / scale
  double mean = 0.0;             // torus integral of N
  double mean_relative = 0.0;    // |mean| / ||u0||_{H^1}^2
};

/// Checks (d_tt - Delta)|u|^2 = 2 N at time t, with d_tt from Richardson-extrapolated
/// central differences. dt <= 0 picks 2^(-k-7) where 2^k bounds the spectrum.
NullIdentityReport null_identity_check(const GridField& u0, double t, double dt = 0.0);

struct InverseLaplacianWeight {
  GridField field;              // (-Delta)^(-1) of the mean-free mollified measure
  double cutoff = 0.0;          // mollifier parameter R (spectrum vanishes beyond 4R)
  double projected_mean = 0.0;  // torus integral of the removed zero mode
  double sup = 0.0;
};

/// Spectral inverse Laplacian of the mollified measure. R <= 0 takes the largest
/// admissible R, just below a quarter of the Nyquist frequency.
InverseLaplacianWeight inverse_laplacian_weight(const AtomicMeasure& mu, const GridSpec& grid, double R = 0.0);

/// Gamma(n/2 - 1) / (4 pi^(n/2)), the constant of the Newton kernel in R^n (n >= 3).
double newton_constant(int n);

/// sum_j w_j |x - x_j|^(-exponent) at each point.
std::vector<double> riesz_kernel_sum(const AtomicMeasure& mu, std::span<const double> points, double exponent);

struct WeightRefinement {
  std::vector<int> N;
  std::vector<double> sup;
  double growth = 0.0;    // sup at the finest grid over sup at the coarsest
  bool unbounded = false;  // every refinement step raised the sup by more than 15%
};

/// Weight sup on N, 2N, 4N, ... at fixed L.
WeightRefinement weight_refinement(const AtomicMeasure& mu, const GridSpec& coarse, int levels = 3);

struct GammaStarValue {
  double functional = 0.0;     // int_0^1 int (|d_t u|^2 - |grad u|^2) W dx dt
  double measure_term = 0.0;   // (1/2) int_0^1 int |u|^2 (mu_R - mean) dx dt
  double boundary_term = 0.0;  // (1/2) int (d_t|u|^2(1) - d_t|u|^2(0)) W dx
  double chain_residual = 0.0; // |functional - measure_term - boundary_term| / max term
  double rhs = 0.0;            // [mu]_alpha ||u0||_{H^sigma}^2
  double ratio = 0.0;          // functional / rhs (signed)
};

/// Time quadrature of the weighted null energy against the inverse-Laplacian weight.
/// mu_R must be the mollified measure W was built from.
GammaStarValue gamma_star_functional(const GridField& u0, const InverseLaplacianWeight& weight, const GridField& mu_R,
                                     double frostman_constant, double sigma, int time_count);

struct GammaStarSample {
  int k = 0;
  double functional = 0.0;
  double boundary_term = 0.0;
  double l2 = 0.0;
};

struct GammaStarReport {
  double alpha = 0.0;
  bool in_scope = false;  // 0 < alpha <= n - 2
  std::vector<GammaStarSample> samples;
  ExponentFit fit;        // |functional| / ||u0||_2^2 against 2^k
  double gamma_star = 0.0;
};

/// Sweeps band-k data u0 = mu_k, k = k_min..k_max, and fits
/// gamma* = (n - alpha)/2 - slope/2.
GammaStarReport estimate_gamma_star(const AtomicMeasure& mu, const FrostmanReport& frostman, int k_min, int k_max,
                                    const GridSpec& grid, int time_count = 0);

struct RieszBoundReport {
  double alpha = 0.0;
  double alpha_prime = 0.0;
  double floor = 0.0;           // points closer than this to an atom are skipped
  std::size_t points_used = 0;
  double sup = 0.0;             // over near-field points
  double worst_constant = 0.0;  // sup / [mu]_alpha
  double dyadic_constant = 0.0; // sum_{j >= -3} 2^((1-j) alpha) 2^(j alpha')
  double far_sup = 0.0;         // over points with |x| > 3
  bool far_within_mass = true;  // far_sup <= ||mu||
};

/// Riesz potential sum_j w_j |x - x_j|^(-alpha') over the spatial grid nodes and
/// the axis offsets at distance `floor` from each atom. floor <= 0 uses the
/// smallest distance between distinct atoms.
RieszBoundReport riesz_bound_check(const AtomicMeasure& mu, const FrostmanReport& frostman, double alpha_prime,
                                   const GridSpec& grid, double floor = 0.0);

struct LeibnizReport {
  double lhs = 0.0;  // ||(-Delta)^s (g h)||_1
  double rhs = 0.0;  // ||(-Delta)^s g||_2 ||h||_2 + ||g||_2 ||(-Delta)^s h||_2
  double ratio = 0.0;
};

/// Both sides of the fractional Leibniz inequality on the grid. The spectra of
/// g and h must sit below half the Nyquist frequency so gh is not aliased.
LeibnizReport fractional_leibniz_check(const GridField& g, const GridField& h, double s);

}  // namespace fwlab
