#pragma once

#include <span>
#include <utility>
#include <vector>

#include "fwlab/evolution.hpp"
#include "fwlab/fourier.hpp"
#include "fwlab/measures.hpp"

namespace fwlab {

/// Least-squares power law on (log2 scale, log2 value).
struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double scale_min = 0.0;
  double scale_max = 0.0;
  std::vector<std::pair<double, double>> samples;  // (log2 scale, log2 value)

  /// Fitted value at `scale`; RangeError outside [scale_min, scale_max].
  double predict(double scale) const;
};

/// Requires at least three samples with positive scales and values.
ExponentFit fit_exponent(std::span<const std::pair<double, double>> samples);

/// (sum_j w_j |field(x_j)|^p)^(1/p), field evaluated by its exact truncated series.
double lp_mu_norm(const GridField& field, const AtomicMeasure& mu, double p);

/// L^p(mu) norm of the half-wave evolution at time t over
/// ||mu||^(1/p - 1/2) [mu]_alpha^(1/2) ||u0||_{H^s}.
double fixed_time_ratio(const GridField& u0, const AtomicMeasure& mu, const FrostmanReport& frostman, double p,
                        double s, double t);

/// sup over f with spectrum in R <= |xi| < 2R (in R^n) of ||f||_{L^2(mu)} / ||f||_2,
/// from the top eigenvalue of the atom-side Gram matrix of the band kernel
/// (Lanczos iteration with full reorthogonalization, single-precision matrix).
struct BandTraceReport {
  double ratio = 0.0;
  int iterations = 0;
  double ritz_change = 0.0;  // relative change of the top Ritz value over the last check
};
BandTraceReport band_trace_sup(const AtomicMeasure& mu, double R, int max_iterations = 150, double tolerance = 1e-9,
                               unsigned seed = 1);

/// Radial kernel of the R^n annulus indicator R <= |xi| < 2R, n in {1,2,3}.
double band_kernel(int n, double R, double rho);

/// (sum_q w_q sum_j mu_j |u(x_j, t_q)|^p)^(1/p) with trapezoid weights on [0,1].
double strichartz_norm(const GridField& u0, const AtomicMeasure& mu, double p, int time_count,
                       Propagator prop = Propagator::cosine);

struct MaximalReport {
  double norm = 0.0;
  double strichartz = 0.0;
  bool ftc_holds = true;
  double ftc_worst_margin = 0.0;  // min over atoms of (rhs - lhs) / rhs
  double refined_norm = 0.0;      // same norm on the doubled time grid
  double refinement_change = 0.0;
};

/// (sum_j w_j max_q |u(x_j, t_q)|^p)^(1/p), with the per-atom chain
/// sup|F|^p <= ||F||_p^p + p ||F||_p^(p-1) ||F'||_p and a time-grid refinement check.
MaximalReport maximal_norm(const GridField& u0, const AtomicMeasure& mu, double p, int time_count,
                           Propagator prop = Propagator::cosine);

/// Time grid used by the sweeps for a band reaching |xi| = rho_max.
int default_time_count(double rho_max);

struct GammaSample {
  int k = 0;
  double strichartz = 0.0;
  double maximal = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  double ratio = 0.0;  // strichartz / ([mu]^(1/p) ||mu_k||_2)
};

struct GammaReport {
  double p = 2.0;
  double alpha = 0.0;
  std::vector<GammaSample> samples;
  ExponentFit fit_l2;        // log2 Q_k vs k
  ExponentFit fit_sobolev;   // log2 (strichartz / ||mu_k||_{H^1}) vs k
  ExponentFit fit_maximal;   // log2 (maximal / ||mu_k||_2) vs k
  double s = 0.0;            // fit_l2 slope
  double gamma_est = 0.0;    // (n - alpha)/2 - s
  double gamma_est_sobolev = 0.0;
  bool requirement_met = false;  // s < (alpha - 1)/2
};

/// Runs u0 = mu_k for k = k_min..k_max on the grid and fits the growth.
GammaReport estimate_gamma(const AtomicMeasure& mu, const FrostmanReport& frostman, double p, int k_min, int k_max,
                           const GridSpec& grid, bool with_maximal = false);

/// Quadrature of |mu^(R omega)|^2 over the unit sphere (n in {2,3}).
double sphere_decay_norm(const AtomicMeasure& mu, double R, int sphere_points);

struct BetaReport {
  ExponentFit fit;  // log2 (value / (||mu|| [mu]_alpha)) vs log2 R
  double beta = 0.0;
  std::vector<double> values;
};
BetaReport estimate_beta(const AtomicMeasure& mu, const FrostmanReport& frostman, std::span<const double> radii,
                         int sphere_points);

/// Quadrature of |nu^(R xi, R |xi|)|^2 over the cone {(xi, |xi|): 1 <= |xi| < 2}
/// with surface measure sqrt(2) d xi.
double cone_decay_norm(const SpacetimeMeasure& nu, double R, int sphere_points, int radial_points);
/// Surface measure of the truncated cone.
double cone_mass(int n);

struct WeakTypeRow {
  double lambda = 0.0;
  double level_mass = 0.0;
  double constant = 0.0;  // lambda^2 level / (R^(n-alpha) [nu]_alpha ||f||_2^2)
};

struct WeakTypeReport {
  std::vector<WeakTypeRow> rows;
  double sup_u = 0.0;
  double bernstein_cap = 0.0;       // sqrt(#modes / L^n) ||f||_2
  double bernstein_constant = 0.0;  // cap / (R^(n/2) ||f||_2)
  bool cap_violated = false;
  double worst_constant = 0.0;
  double q = 2.0;
  double lq_direct = 0.0;
  double lq_layer_cake = 0.0;
  double layer_cake_error = 0.0;  // relative
};

/// Level sets of |e^{it sqrt(-Delta)} f| on the atoms of nu. Empty `lambdas`
/// selects a geometric grid below the Bernstein cap.
WeakTypeReport weak_type_check(const GridField& f_band, double R, const SpacetimeMeasure& nu,
                               const FrostmanReport& frostman, std::span<const double> lambdas, double q = 2.0,
                               int layer_levels = 4096);

}  // namespace fwlab
