#pragma once

#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "fwlab/experiments.hpp"
#include "fwlab/measures.hpp"

namespace fwlab::detail {

/// Config view with defaults; every key read is echoed into `resolved`.
class Params {
public:
  explicit Params(const Json& config) : config_(config) {}
  double number(const std::string& key, double fallback);
  int integer(const std::string& key, int fallback);
  bool boolean(const std::string& key, bool fallback);
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback);
  std::vector<int> integers(const std::string& key, std::vector<int> fallback);
  bool has(const std::string& key) const { return config_.contains(key); }
  const Json& raw(const std::string& key) const { return config_.at(key); }
  /// Gate bound from "tolerances", falling back to the default.
  double tolerance(const std::string& name, double fallback);
  std::uint64_t seed() const { return config_.value("seed", std::uint64_t{1}); }
  int threads() const { return config_.value("threads", 1); }
  Json resolved = Json::object();

private:
  const Json& config_;
};

struct BuiltMeasure {
  AtomicMeasure mu;
  double alpha = 0.0;   // dimension of the construction
  double floor = 0.0;   // finest meaningful scale
  std::string label;
};

/// Builds the measure described by a measure object; `points_override` > 0
/// replaces the sphere point count.
BuiltMeasure build_measure(const Json& spec, int points_override = 0);

/// Grid from an explicit {"N", "L"} object, or the smallest power-of-two N on
/// the padded box with 2^k_max below the Nyquist frequency.
GridSpec choose_grid(const Params& p, const AtomicMeasure& mu, int k_max, double nyquist_factor = 1.0);

std::vector<double> dyadic(int lo, int hi);

/// Runs body(i) for i in [0, count) on up to `threads` threads; results are
/// written by index so the output order is fixed. Bodies must not touch the
/// grid transforms (FFT planning is not thread-safe).
template <class F>
void parallel_for(std::size_t count, int threads, F body) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t T = std::min<std::size_t>(count, static_cast<std::size_t>(threads));
  for (std::size_t w = 0; w < T; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += T) body(i);
    });
  for (auto& t : pool) t.join();
}

ResultRecord run_frostman_audit(Params& p);
ResultRecord run_lp_bounds(Params& p, const std::string& snapshot_dir);
ResultRecord run_fixed_time_fit(Params& p);
ResultRecord run_gamma_fit(Params& p);
ResultRecord run_beta_fit(Params& p);
ResultRecord run_cone_fit(Params& p);
ResultRecord run_maximal_embed(Params& p);
ResultRecord run_distance_density(Params& p);
ResultRecord run_falconer_lattice_sweep(Params& p);
ResultRecord run_exponent_atlas(Params& p);
ResultRecord run_nullform_suite(Params& p);
ResultRecord run_weak_type_chain(Params& p, const std::string& snapshot_dir);

}  // namespace fwlab::detail
