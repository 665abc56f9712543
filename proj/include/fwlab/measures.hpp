#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace fwlab {

/// Upper bound on the number of atoms any constructor will produce.
inline constexpr std::size_t kAtomBudget = std::size_t{1} << 24;

/// Finite nonnegative weighted point cloud in R^n.
///
/// Points are stored row-major in one flat buffer (atom j occupies
/// positions()[j*n .. j*n+n)). Instances are immutable once built; all
/// transforms return new measures.
class AtomicMeasure {
public:
  AtomicMeasure() = default;
  /// Throws ParameterError on negative/non-finite weights or mismatched sizes.
  AtomicMeasure(int n, std::vector<double> points, std::vector<double> weights,
                bool is_even = false, double diameter_hint = -1.0);

  int dimension() const { return n_; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  bool is_even() const { return is_even_; }
  double total_mass() const { return total_mass_; }
  double diameter_hint() const { return diameter_hint_; }

  std::span<const double> point(std::size_t j) const {
    return {points_.data() + j * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  double weight(std::size_t j) const { return weights_[j]; }
  const std::vector<double>& positions() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Diameter of the atom set, computed exactly (O(atoms^2) beyond 4096 atoms
  /// falls back to the bounding-box diagonal, an upper bound).
  double support_diameter() const;
  /// Largest |x| over atoms.
  double max_norm() const;
  /// Smallest |x| over atoms.
  double min_norm() const;

private:
  int n_ = 0;
  std::vector<double> points_;
  std::vector<double> weights_;
  double total_mass_ = 0.0;
  bool is_even_ = false;
  double diameter_hint_ = 0.0;
};

/// Weighted point cloud in R^{n+1}; the last coordinate is time.
class SpacetimeMeasure {
public:
  SpacetimeMeasure() = default;
  SpacetimeMeasure(int spatial_dimension, std::vector<double> points, std::vector<double> weights);

  int spatial_dimension() const { return n_; }
  std::size_t size() const { return weights_.size(); }
  double total_mass() const { return total_mass_; }
  std::span<const double> point(std::size_t j) const {
    return {points_.data() + j * static_cast<std::size_t>(n_ + 1), static_cast<std::size_t>(n_ + 1)};
  }
  double weight(std::size_t j) const { return weights_[j]; }
  const std::vector<double>& positions() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }

  /// View as an (n+1)-dimensional atomic measure (for growth-constant audits).
  AtomicMeasure as_atomic() const;

private:
  int n_ = 0;
  std::vector<double> points_;
  std::vector<double> weights_;
  double total_mass_ = 0.0;
};

struct FrostmanReport {
  double alpha = 0.0;
  double constant_estimate = 0.0;
  bool infinite = false;               // set only for degenerate inputs (zero radius)
  std::vector<double> scales_probed;   // radii, decreasing
  std::vector<double> argmax_center;
  double argmax_radius = 0.0;
  bool attained_at_floor = false;      // maximum came from the finest radius
  double finest_scale = 0.0;
};

AtomicMeasure build_cantor_product(double ratio, int depth, int n);
/// Hausdorff dimension n*log2/log(1/ratio) of the limiting product set.
double cantor_dimension(double ratio, int n);
/// Contraction ratio whose n-fold product Cantor set has dimension alpha.
double cantor_ratio_for_dimension(double alpha, int n);

/// One generation of the lattice construction: (q+1)^n atoms on (1/q)Z^n ∩ [0,1]^n.
/// The thickening radius q^(-n/alpha) is returned separately by falconer_radius.
AtomicMeasure build_falconer_lattice(int q, double alpha, int n);
double falconer_radius(int q, double alpha, int n);

/// Quasi-uniform atoms on the origin-centred sphere of radius t (n = 2 or 3),
/// weights summing to the surface area.
AtomicMeasure build_sphere_measure(double t, int n, int points);

/// Uniform tensor grid of m^n cell-centred atoms on [0,1]^n with unit mass.
AtomicMeasure build_uniform_grid(int m, int n);

AtomicMeasure translate(const AtomicMeasure& mu, std::span<const double> shift);
AtomicMeasure scale_weights(const AtomicMeasure& mu, double factor);
AtomicMeasure evenize(const AtomicMeasure& mu);

/// Growth-constant audit sup mu(B(x,r))/r^alpha over atom-centred open balls
/// with radii diameter_hint * 2^-i down to finest_scale (always included),
/// plus the smallest ball about the centroid holding all mass.
FrostmanReport frostman_constant(const AtomicMeasure& mu, double alpha, double finest_scale);

/// Mass of the open ball B(center, r).
double ball_mass(const AtomicMeasure& mu, std::span<const double> center, double r);

struct DiracTime {
  double t0 = 0.0;
};
struct UniformTimeGrid {
  int count = 1;
};
using TimeLaw = std::variant<DiracTime, UniformTimeGrid>;

/// Lift a spatial measure to space-time. uniform_grid places `count` copies
/// at the cell midpoints t_i = (i + 1/2)/count of [0,1], each with weight w/count.
SpacetimeMeasure product_with_time(const AtomicMeasure& mu, const TimeLaw& law);

}  // namespace fwlab
