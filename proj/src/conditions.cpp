#include "fwlab/conditions.hpp"

#include <algorithm>
#include <cmath>

#include "fwlab/error.hpp"

namespace fwlab {

double s_necessary(double alpha, double p, int n) {
  if (n < 2) throw RangeError("s_necessary needs n >= 2");
  if (!(p >= 1.0)) throw RangeError("s_necessary needs p >= 1");
  if (!(alpha > 0.0 && alpha <= n + 1)) throw RangeError("s_necessary needs 0 < alpha <= n + 1");
  const double base = n / 2.0 - alpha / p;
  double v = base;
  // Seams are closed on both sides; the max of the adjacent branches is taken.
  if (alpha <= 1.0) v = std::max(v, (n + 1) / 4.0);
  if (alpha >= 1.0 && alpha <= n)
    v = std::max({v, (n + 1) / 4.0 - (alpha - 1.0) / (2.0 * p), (n + 2) / 4.0 - alpha / 4.0});
  if (alpha >= n) v = std::max({v, (n + 1) / 4.0 - (2.0 * alpha - (n + 1)) / (2.0 * p), (n + 1) / 2.0 - alpha / 2.0});
  return v;
}

std::optional<double> sufficient_s(double alpha, double p, int n) {
  if (!(p >= 1.0)) throw RangeError("sufficient_s needs p >= 1");
  if (n != 2 && n != 3) return std::nullopt;
  return s_necessary(alpha, std::max(p, 2.0), n);
}

double new_necessary(double alpha, double p, int n) {
  if (!(p >= 1.0 && p <= 2.0)) throw RangeError("new_necessary needs p in [1, 2]");
  return std::max((n - alpha) / 2.0, (n + 2 - alpha) / 4.0) - 1.0 / p;
}

AlphaInterval new_condition_region(double p, int n) {
  if (!(p >= 1.0 && p <= 2.0)) throw RangeError("new_condition_region needs p in [1, 2]");
  if (n < 2) throw RangeError("new_condition_region needs n >= 2");
  AlphaInterval out;
  out.lo = std::max({(n + 2) / 2.0 - 2.0 / p, 4.0 - 4.0 / p, 0.0});
  out.hi = n / 2.0;
  out.empty = !(out.lo < out.hi);
  return out;
}

std::vector<GammaBound> gamma_table_rows(double alpha, int n) {
  if (n < 2) throw RangeError("gamma_lower_bound needs n >= 2");
  if (!(alpha > 0.0 && alpha <= n)) throw RangeError("gamma_lower_bound needs 0 < alpha <= n");
  const double h = n / 2.0;
  std::vector<GammaBound> rows;
  if (alpha <= (n - 1) / 2.0) rows.push_back({0.5, "Mattila"});
  if (alpha >= (n - 1) / 2.0 && alpha <= h) rows.push_back({0.5 - (2.0 * alpha - n + 1) / 4.0, "Mattila"});
  if (alpha >= h && alpha <= h + 1) rows.push_back({0.25 - (2.0 * alpha - n) / 8.0, "Erdogan/Wolff"});
  if (alpha >= h) rows.push_back({(n - alpha) * (n - alpha) / (2.0 * (n - 1) * (2.0 * n - alpha - 1)), "Luca-Rogers"});
  return rows;
}

GammaBound gamma_lower_bound(double alpha, int n) {
  GammaBound best{-1.0, ""};
  for (const auto& r : gamma_table_rows(alpha, n))
    if (r.value > best.value) best = r;
  return best;
}

std::optional<double> falconer_threshold_from_gamma(std::span<const std::pair<double, double>> samples, int n) {
  std::optional<double> best;
  for (const auto& [alpha, gamma] : samples)
    if (gamma >= (n + 1) / 2.0 - alpha && (!best || alpha < *best)) best = alpha;
  return best;
}

bool wells_condition(double gamma, double alpha, int n) {
  if (!(alpha > (n - 1) / 2.0 && alpha < (n + 1) / 2.0))
    throw RangeError("the smoothing-to-Falconer implication needs (n-1)/2 < alpha < (n+1)/2");
  return gamma >= (n + 1) / 2.0 - alpha;
}

bool mattila_threshold(double beta, double alpha, int n) {
  if (!(alpha > 0.0 && alpha <= n)) throw RangeError("the spherical-average criterion needs 0 < alpha <= n");
  return beta >= n - alpha;
}

double prop_well(double beta, double alpha) { return (beta + 1.0 - alpha) / 2.0; }

double prop_nullform(double gamma_star) { return std::min(gamma_star, 0.5); }

double liu_pinned(double dim_e, int n) {
  if (!(dim_e >= n / 2.0 && dim_e <= (n + 1) / 2.0))
    throw RangeError("the pinned-distance bound needs dimE in [n/2, (n+1)/2]");
  return 1.5 * n + 1.0 - 2.0 * dim_e;
}

}  // namespace fwlab
