#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "fwlab/fourier.hpp"
#include "fwlab/measures.hpp"

namespace fwlab {

/// Histogram of the push-forward of mu x mu under (x, y) -> |x - y|, each pair
/// weighted by |x - y|^lambda.
struct DistanceDensity {
  std::vector<double> bin_edges;
  std::vector<double> masses;
  double lambda = 0.0;
  double total = 0.0;
  double skipped_mass = 0.0;  // coincident pairs dropped when lambda < 0
  std::size_t skipped_pairs = 0;

  std::size_t bins() const { return masses.size(); }
  /// max over bins of mass / width.
  double max_density() const;
  /// bin_center,mass,density rows with a header line.
  std::string to_csv() const;
};

/// Ordered-pair histogram on [0, range) with `bins` equal bins; range <= 0
/// selects the largest pairwise distance (slightly widened).
DistanceDensity pushforward(const AtomicMeasure& mu, double lambda, int bins, double range = -1.0);

/// Sup bin density at bins, 2 bins and 4 bins over a common range.
std::array<double, 3> density_refinement(const AtomicMeasure& mu, double lambda, int bins);

/// Default weight exponent max(4, ceil(2n / (2 alpha - (n - 1)))) for alpha > (n-1)/2.
double default_lambda(double alpha, int n);

/// Lebesgue measure of the union of [d - r, d + r] over all ordered-pair distances d.
double distance_set_measure(const AtomicMeasure& mu, double r);

/// Sphere of radius t with quadrature weights summing to its area: equispaced
/// for n = 2, Gauss-Legendre in the polar cosine times equispaced azimuth for n = 3.
AtomicMeasure sphere_quadrature(int n, double t, int resolution);

/// (sigma_t * mu_k)(x) at each point, by sphere quadrature of the band-limited field.
std::vector<double> spherical_convolution(const LittlewoodPaleyPiece& piece, double t, std::span<const double> points,
                                          int resolution = 0);

struct MattilaSplitReport {
  double t = 0.0;
  double window_low = 0.0;          // 2^(-nk/lambda)
  std::vector<double> lhs;          // sigma_t * mu_k
  std::vector<double> main;         // leading stationary-phase term
  std::vector<double> scaled_cos;   // 2^(-(n-1)k/2) t^((n-1)/2) |cos(t sqrt(-Delta) - (n-1)pi/4) mu_k|
  double worst_ratio = 0.0;         // max|lhs| / (max scaled_cos + max|lhs - main|)
  double remainder_fraction = 0.0;  // max|lhs - main| / max|main|
  bool main_dominates = false;      // remainder_fraction < 1/2
};

/// Compares sigma_t * mu_k with its cosine-propagator main term; t must lie in
/// [2^(-nk/lambda), 1].
MattilaSplitReport mattila_split_check(const LittlewoodPaleyPiece& piece, double t, std::span<const double> points,
                                       double lambda);

}  // namespace fwlab
