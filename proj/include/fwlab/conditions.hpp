#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fwlab {

/// Necessary Sobolev exponent for the local smoothing estimate in L^p(mu x dt).
/// Valid for 0 < alpha <= n + 1, p >= 1, n >= 2.
double s_necessary(double alpha, double p, int n);

/// Threshold above which s is known to suffice; only known for n = 2 or 3,
/// otherwise std::nullopt.
std::optional<double> sufficient_s(double alpha, double p, int n);

/// max{(n - alpha)/2, (n + 2 - alpha)/4} - 1/p, for p in [1, 2].
double new_necessary(double alpha, double p, int n);

/// Open alpha-interval (lo, hi) on which (n - 2)/4 > new_necessary.
struct AlphaInterval {
  bool empty = true;
  double lo = 0.0;
  double hi = 0.0;
};

AlphaInterval new_condition_region(double p, int n);

struct GammaBound {
  double value = 0.0;
  std::string source;  // attribution of the row attaining the max
};

/// Rows of the lower-bound table whose alpha-range (closed) contains alpha.
std::vector<GammaBound> gamma_table_rows(double alpha, int n);

/// Best known lower bound for the smoothing exponent gamma_n(alpha), 0 < alpha <= n:
/// the largest applicable row.
GammaBound gamma_lower_bound(double alpha, int n);

/// Least sampled alpha with gamma(alpha) >= (n + 1)/2 - alpha; samples are
/// (alpha, gamma) pairs in any order. std::nullopt when no sample qualifies.
std::optional<double> falconer_threshold_from_gamma(std::span<const std::pair<double, double>> samples, int n);

/// gamma >= (n + 1)/2 - alpha, for (n - 1)/2 < alpha < (n + 1)/2.
bool wells_condition(double gamma, double alpha, int n);

/// beta >= n - alpha, for 0 < alpha <= n.
bool mattila_threshold(double beta, double alpha, int n);

/// Smoothing exponent (beta + 1 - alpha)/2 implied by spherical-average decay beta.
double prop_well(double beta, double alpha);

/// Smoothing exponent min{gamma*, 1/2} implied by the null-form exponent gamma*.
double prop_nullform(double gamma_star);

/// Pinned-distance threshold 3n/2 + 1 - 2 dimE, for dimE in [n/2, (n + 1)/2].
double liu_pinned(double dim_e, int n);

}  // namespace fwlab
