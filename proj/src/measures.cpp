#include "fwlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fwlab/error.hpp"

namespace fwlab {

namespace {

double kahan_sum(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void validate_cloud(int dim, const std::vector<double>& points, const std::vector<double>& weights) {
  if (dim < 1) throw ParameterError("measure dimension must be positive");
  if (points.size() != weights.size() * static_cast<std::size_t>(dim))
    throw ParameterError("point buffer size does not match atom count");
  for (double w : weights)
    if (!std::isfinite(w) || w < 0.0) throw ParameterError("atom weights must be finite and nonnegative");
  for (double x : points)
    if (!std::isfinite(x)) throw ParameterError("atom coordinates must be finite");
}

}  // namespace

AtomicMeasure::AtomicMeasure(int n, std::vector<double> points, std::vector<double> weights, bool is_even,
                             double diameter_hint)
    : n_(n), points_(std::move(points)), weights_(std::move(weights)), is_even_(is_even) {
  validate_cloud(n_, points_, weights_);
  total_mass_ = kahan_sum(weights_);
  diameter_hint_ = diameter_hint >= 0.0 ? diameter_hint : support_diameter();
}

double AtomicMeasure::support_diameter() const {
  const std::size_t m = size();
  if (m < 2) return 0.0;
  if (m <= 4096) {
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) best = std::max(best, dist2(point(i), point(j)));
    return std::sqrt(best);
  }
  double diag = 0.0;
  for (int a = 0; a < n_; ++a) {
    double lo = points_[a], hi = points_[a];
    for (std::size_t j = 0; j < m; ++j) {
      lo = std::min(lo, points_[j * n_ + a]);
      hi = std::max(hi, points_[j * n_ + a]);
    }
    diag += (hi - lo) * (hi - lo);
  }
  return std::sqrt(diag);
}

double AtomicMeasure::max_norm() const {
  double best = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    double s = 0.0;
    for (double x : point(j)) s += x * x;
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

double AtomicMeasure::min_norm() const {
  if (empty()) return 0.0;
  double best = INFINITY;
  for (std::size_t j = 0; j < size(); ++j) {
    double s = 0.0;
    for (double x : point(j)) s += x * x;
    best = std::min(best, s);
  }
  return std::sqrt(best);
}

SpacetimeMeasure::SpacetimeMeasure(int spatial_dimension, std::vector<double> points, std::vector<double> weights)
    : n_(spatial_dimension), points_(std::move(points)), weights_(std::move(weights)) {
  validate_cloud(n_ + 1, points_, weights_);
  total_mass_ = kahan_sum(weights_);
}

AtomicMeasure SpacetimeMeasure::as_atomic() const { return AtomicMeasure(n_ + 1, points_, weights_); }

double cantor_dimension(double ratio, int n) { return n * std::log(2.0) / std::log(1.0 / ratio); }

double cantor_ratio_for_dimension(double alpha, int n) {
  if (!(alpha > 0.0) || alpha > n) throw ParameterError("cantor dimension must lie in (0, n]");
  return std::pow(2.0, -static_cast<double>(n) / alpha);
}

AtomicMeasure build_cantor_product(double ratio, int depth, int n) {
  if (!(ratio > 0.0 && ratio <= 0.5)) throw ParameterError("cantor ratio must lie in (0, 1/2]");
  if (depth < 1 || n < 1) throw ParameterError("cantor depth and dimension must be positive");
  if (static_cast<long long>(depth) * n > 24)
    throw ResourceError("cantor product would exceed the atom budget of 2^24 (depth*n > 24)");

  // Midpoints of the depth-th generation intervals in [0,1].
  std::vector<double> mids{0.5};
  double len = 1.0;
  for (int d = 0; d < depth; ++d) {
    const double child = len * ratio;
    std::vector<double> next;
    next.reserve(mids.size() * 2);
    for (double c : mids) {
      const double left = c - len / 2.0;
      next.push_back(left + child / 2.0);
      next.push_back(left + len - child / 2.0);
    }
    mids = std::move(next);
    len = child;
  }

  const std::size_t per_axis = mids.size();
  std::size_t count = 1;
  for (int a = 0; a < n; ++a) count *= per_axis;
  std::vector<double> pts(count * n);
  std::vector<double> w(count, std::pow(2.0, -static_cast<double>(depth) * n));
  for (std::size_t j = 0; j < count; ++j) {
    std::size_t rem = j;
    for (int a = n - 1; a >= 0; --a) {
      pts[j * n + a] = mids[rem % per_axis];
      rem /= per_axis;
    }
  }
  const double diam = (mids.back() - mids.front()) * std::sqrt(static_cast<double>(n));
  return AtomicMeasure(n, std::move(pts), std::move(w), false, diam);
}

double falconer_radius(int q, double alpha, int n) { return std::pow(static_cast<double>(q), -n / alpha); }

AtomicMeasure build_falconer_lattice(int q, double alpha, int n) {
  if (q < 2) throw ParameterError("lattice parameter q must be at least 2");
  if (!(alpha > 0.0 && alpha < n)) throw ParameterError("lattice alpha must lie in (0, n)");
  std::size_t per_axis = static_cast<std::size_t>(q) + 1, count = 1;
  for (int a = 0; a < n; ++a) {
    count *= per_axis;
    if (count > kAtomBudget) throw ResourceError("lattice exceeds the atom budget");
  }
  std::vector<double> pts(count * n);
  std::vector<double> w(count, 1.0 / static_cast<double>(count));
  for (std::size_t j = 0; j < count; ++j) {
    std::size_t rem = j;
    for (int a = n - 1; a >= 0; --a) {
      pts[j * n + a] = static_cast<double>(rem % per_axis) / q;
      rem /= per_axis;
    }
  }
  return AtomicMeasure(n, std::move(pts), std::move(w), false, std::sqrt(static_cast<double>(n)));
}

AtomicMeasure build_sphere_measure(double t, int n, int points) {
  if (n != 2 && n != 3) throw ParameterError("sphere measure supports n = 2 or 3 only");
  if (!(t > 0.0)) throw ParameterError("sphere radius must be positive");
  if (points < 2) throw ParameterError("sphere measure needs at least 2 points");
  const double pi = std::numbers::pi;
  const double area = n == 2 ? 2.0 * pi * t : 4.0 * pi * t * t;
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(points) * n);
  const bool paired = points % 2 == 0;
  const int half = paired ? points / 2 : points;

  if (n == 2) {
    for (int j = 0; j < half; ++j) {
      const double th = 2.0 * pi * j / points;
      pts.push_back(t * std::cos(th));
      pts.push_back(t * std::sin(th));
    }
  } else {
    const double golden = pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < half; ++j) {
      const double z = 1.0 - (2.0 * j + 1.0) / points;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double ph = golden * j;
      pts.push_back(t * rho * std::cos(ph));
      pts.push_back(t * rho * std::sin(ph));
      pts.push_back(t * z);
    }
  }
  if (paired) {
    const std::size_t first = pts.size();
    for (std::size_t i = 0; i < first; ++i) pts.push_back(-pts[i]);
  }
  std::vector<double> w(static_cast<std::size_t>(points), area / points);
  return AtomicMeasure(n, std::move(pts), std::move(w), paired, 2.0 * t);
}

AtomicMeasure build_uniform_grid(int m, int n) {
  if (m < 1 || n < 1) throw ParameterError("uniform grid needs m, n >= 1");
  std::size_t count = 1;
  for (int a = 0; a < n; ++a) {
    count *= static_cast<std::size_t>(m);
    if (count > kAtomBudget) throw ResourceError("uniform grid exceeds the atom budget");
  }
  std::vector<double> pts(count * n);
  std::vector<double> w(count, 1.0 / static_cast<double>(count));
  for (std::size_t j = 0; j < count; ++j) {
    std::size_t rem = j;
    for (int a = n - 1; a >= 0; --a) {
      pts[j * n + a] = (static_cast<double>(rem % m) + 0.5) / m;
      rem /= m;
    }
  }
  return AtomicMeasure(n, std::move(pts), std::move(w), false, std::sqrt(static_cast<double>(n)));
}

AtomicMeasure translate(const AtomicMeasure& mu, std::span<const double> shift) {
  const int n = mu.dimension();
  if (shift.size() != static_cast<std::size_t>(n)) throw ParameterError("shift dimension mismatch");
  std::vector<double> pts = mu.positions();
  for (std::size_t j = 0; j < mu.size(); ++j)
    for (int a = 0; a < n; ++a) pts[j * n + a] += shift[a];
  return AtomicMeasure(n, std::move(pts), mu.weights(), false, mu.diameter_hint());
}

AtomicMeasure scale_weights(const AtomicMeasure& mu, double factor) {
  std::vector<double> w = mu.weights();
  for (double& x : w) x *= factor;
  return AtomicMeasure(mu.dimension(), mu.positions(), std::move(w), mu.is_even(), mu.diameter_hint());
}

AtomicMeasure evenize(const AtomicMeasure& mu) {
  const int n = mu.dimension();
  std::vector<double> pts = mu.positions();
  std::vector<double> w = mu.weights();
  const std::size_t m = mu.size();
  pts.reserve(2 * pts.size());
  w.reserve(2 * m);
  for (std::size_t i = 0; i < m * n; ++i) pts.push_back(-pts[i]);
  for (std::size_t j = 0; j < m; ++j) w.push_back(mu.weight(j));
  const double diam = std::max(mu.diameter_hint(), 2.0 * mu.max_norm());
  return AtomicMeasure(n, std::move(pts), std::move(w), true, diam);
}

SpacetimeMeasure product_with_time(const AtomicMeasure& mu, const TimeLaw& law) {
  const int n = mu.dimension();
  std::vector<double> pts;
  std::vector<double> w;
  if (const auto* d = std::get_if<DiracTime>(&law)) {
    pts.reserve(mu.size() * (n + 1));
    for (std::size_t j = 0; j < mu.size(); ++j) {
      for (double x : mu.point(j)) pts.push_back(x);
      pts.push_back(d->t0);
      w.push_back(mu.weight(j));
    }
  } else {
    const int count = std::get<UniformTimeGrid>(law).count;
    if (count < 1) throw ParameterError("uniform time grid needs count >= 1");
    pts.reserve(mu.size() * count * (n + 1));
    for (std::size_t j = 0; j < mu.size(); ++j) {
      for (int i = 0; i < count; ++i) {
        for (double x : mu.point(j)) pts.push_back(x);
        pts.push_back((i + 0.5) / count);
        w.push_back(mu.weight(j) / count);
      }
    }
  }
  return SpacetimeMeasure(n, std::move(pts), std::move(w));
}

double ball_mass(const AtomicMeasure& mu, std::span<const double> center, double r) {
  const double r2 = r * r;
  double s = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (dist2(mu.point(j), center) < r2) s += mu.weight(j);
  return s;
}

namespace {

// Dense cell grid with per-row prefix sums along the last axis. Ball masses
// are assembled row by row: cells wholly inside the ball come from the
// prefix sums, cells straddling the sphere are resolved atom by atom.
class CellIndex {
public:
  CellIndex(const AtomicMeasure& mu, double cell) : mu_(mu), n_(mu.dimension()), cell_(cell) {
    lo_.assign(n_, 0.0);
    dims_.assign(n_, 1);
    for (int a = 0; a < n_; ++a) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t j = 0; j < mu.size(); ++j) {
        lo = std::min(lo, mu.positions()[j * n_ + a]);
        hi = std::max(hi, mu.positions()[j * n_ + a]);
      }
      lo_[a] = lo;
      dims_[a] = static_cast<long>(std::floor((hi - lo) / cell_)) + 1;
    }
    std::size_t total = 1;
    for (long d : dims_) total *= static_cast<std::size_t>(d);
    start_.assign(total + 1, 0);
    std::vector<std::size_t> cell_of(mu.size());
    for (std::size_t j = 0; j < mu.size(); ++j) {
      cell_of[j] = flat_cell(mu.point(j));
      ++start_[cell_of[j] + 1];
    }
    for (std::size_t c = 0; c < total; ++c) start_[c + 1] += start_[c];
    atoms_.resize(mu.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t j = 0; j < mu.size(); ++j) atoms_[fill[cell_of[j]]++] = j;
    // Row prefix sums of cell mass (exclusive), one extra slot per row.
    const long last = dims_[n_ - 1];
    const std::size_t rows = total / static_cast<std::size_t>(last);
    prefix_.assign(rows * (last + 1), 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (long i = 0; i < last; ++i) {
        const std::size_t c = r * last + i;
        double m = 0.0;
        for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) m += mu.weight(atoms_[k]);
        prefix_[r * (last + 1) + i + 1] = prefix_[r * (last + 1) + i] + m;
      }
    }
  }

  double ball_mass(std::span<const double> x, double r) const {
    const double r2 = r * r;
    std::vector<long> lo_idx(n_), hi_idx(n_);
    for (int a = 0; a < n_; ++a) {
      lo_idx[a] = std::max(0L, static_cast<long>(std::floor((x[a] - r - lo_[a]) / cell_)));
      hi_idx[a] = std::min(dims_[a] - 1, static_cast<long>(std::floor((x[a] + r - lo_[a]) / cell_)));
      if (lo_idx[a] > hi_idx[a]) return 0.0;
    }
    double mass = 0.0;
    std::vector<long> idx(lo_idx.begin(), lo_idx.end() - 1);
    const int lead = n_ - 1;
    const long last = dims_[lead];
    const double z = x[lead];
    while (true) {
      // Distance bounds from x to the row's slab in the leading axes.
      double dmin2 = 0.0, dmax2 = 0.0;
      std::size_t row = 0;
      for (int a = 0; a < lead; ++a) {
        const double c0 = lo_[a] + idx[a] * cell_, c1 = c0 + cell_;
        const double near = x[a] < c0 ? c0 - x[a] : (x[a] > c1 ? x[a] - c1 : 0.0);
        const double far = std::max(std::abs(x[a] - c0), std::abs(x[a] - c1));
        dmin2 += near * near;
        dmax2 += far * far;
        row = row * dims_[a] + idx[a];
      }
      if (dmin2 < r2) {
        long full_lo = 1, full_hi = 0;
        const double slack = r2 * (1.0 - 1e-12) - dmax2;
        if (slack > 0.0) {
          const double s = std::sqrt(slack);
          full_lo = std::max(0L, static_cast<long>(std::floor((z - s - lo_[lead]) / cell_)) + 1);
          full_hi = std::min(last - 1, static_cast<long>(std::ceil((z + s - lo_[lead]) / cell_)) - 2);
          // Guard against floor/ceil rounding at cell edges.
          while (full_lo <= full_hi && lo_[lead] + full_lo * cell_ <= z - s) ++full_lo;
          while (full_lo <= full_hi && lo_[lead] + (full_hi + 1) * cell_ >= z + s) --full_hi;
        }
        if (full_lo <= full_hi)
          mass += prefix_[row * (last + 1) + full_hi + 1] - prefix_[row * (last + 1) + full_lo];
        const double sp = std::sqrt(r2 - dmin2);
        const long part_lo = std::max(lo_idx[lead], static_cast<long>(std::floor((z - sp - lo_[lead]) / cell_)));
        const long part_hi = std::min(hi_idx[lead], static_cast<long>(std::floor((z + sp - lo_[lead]) / cell_)));
        auto scan = [&](long from, long to) {
          for (long i = from; i <= to; ++i) {
            const std::size_t c = row * last + i;
            for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
              const std::size_t j = atoms_[k];
              if (dist2(mu_.point(j), x) < r2) mass += mu_.weight(j);
            }
          }
        };
        if (full_lo <= full_hi) {
          scan(part_lo, full_lo - 1);
          scan(full_hi + 1, part_hi);
        } else {
          scan(part_lo, part_hi);
        }
      }
      int a = lead - 1;
      while (a >= 0 && idx[a] == hi_idx[a]) {
        idx[a] = lo_idx[a];
        --a;
      }
      if (a < 0) break;
      ++idx[a];
    }
    return mass;
  }

private:
  std::size_t flat_cell(std::span<const double> p) const {
    std::size_t c = 0;
    for (int a = 0; a < n_; ++a) {
      long i = static_cast<long>(std::floor((p[a] - lo_[a]) / cell_));
      i = std::clamp(i, 0L, dims_[a] - 1);
      c = c * dims_[a] + i;
    }
    return c;
  }

  const AtomicMeasure& mu_;
  int n_;
  double cell_;
  std::vector<double> lo_;
  std::vector<long> dims_;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> atoms_;
  std::vector<double> prefix_;
};

double choose_cell(const AtomicMeasure& mu, double r) {
  const int n = mu.dimension();
  double volume = 1.0;
  for (int a = 0; a < n; ++a) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      lo = std::min(lo, mu.positions()[j * n + a]);
      hi = std::max(hi, mu.positions()[j * n + a]);
    }
    volume *= std::max(hi - lo, 1e-9);
  }
  const double per_atom = std::pow(volume / static_cast<double>(mu.size()), 1.0 / n);
  const double cap = std::pow(volume / static_cast<double>(1 << 22), 1.0 / n);
  return std::max({per_atom, r / 256.0, cap, 1e-12});
}

}  // namespace

FrostmanReport frostman_constant(const AtomicMeasure& mu, double alpha, double finest_scale) {
  if (mu.empty() || !(mu.total_mass() > 0.0)) throw DomainError("frostman audit of an empty measure");
  if (!(alpha > 0.0) || alpha > mu.dimension()) throw ParameterError("frostman alpha must lie in (0, n]");
  if (!(finest_scale > 0.0)) throw ParameterError("finest scale must be positive");

  FrostmanReport rep;
  rep.alpha = alpha;
  rep.finest_scale = finest_scale;
  const int n = mu.dimension();

  double top = mu.diameter_hint();
  if (!(top > finest_scale)) top = finest_scale;
  for (double r = top; r > finest_scale * (1.0 + 1e-12); r *= 0.5) rep.scales_probed.push_back(r);
  rep.scales_probed.push_back(finest_scale);

  double best = -1.0;
  for (std::size_t s = 0; s < rep.scales_probed.size(); ++s) {
    const double r = rep.scales_probed[s];
    const double denom = std::pow(r, alpha);
    std::vector<double> masses(mu.size());
    if (n <= 3 && mu.size() > 64) {
      const CellIndex index(mu, choose_cell(mu, r));
      for (std::size_t j = 0; j < mu.size(); ++j) masses[j] = index.ball_mass(mu.point(j), r);
    } else {
      for (std::size_t j = 0; j < mu.size(); ++j) masses[j] = ball_mass(mu, mu.point(j), r);
    }
    for (std::size_t j = 0; j < mu.size(); ++j) {
      const double ratio = masses[j] / denom;
      if (ratio > best) {
        best = ratio;
        const auto p = mu.point(j);
        rep.argmax_center.assign(p.begin(), p.end());
        rep.argmax_radius = r;
        rep.attained_at_floor = s + 1 == rep.scales_probed.size();
      }
    }
  }

  // The smallest centroid ball containing every atom.
  std::vector<double> centroid(n, 0.0);
  for (std::size_t j = 0; j < mu.size(); ++j)
    for (int a = 0; a < n; ++a) centroid[a] += mu.weight(j) * mu.positions()[j * n + a];
  for (double& c : centroid) c /= mu.total_mass();
  double far2 = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) far2 = std::max(far2, dist2(mu.point(j), centroid));
  if (far2 > 0.0) {
    const double r_all = std::nextafter(std::sqrt(far2), INFINITY);
    const double ratio = mu.total_mass() / std::pow(r_all, alpha);
    if (ratio > best) {
      best = ratio;
      rep.argmax_center = centroid;
      rep.argmax_radius = r_all;
      rep.attained_at_floor = r_all <= finest_scale;
    }
  }
  rep.constant_estimate = best;
  return rep;
}

}  // namespace fwlab
