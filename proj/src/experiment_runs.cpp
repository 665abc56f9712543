#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "experiment_detail.hpp"
#include "fwlab/conditions.hpp"
#include "fwlab/distance.hpp"
#include "fwlab/error.hpp"
#include "fwlab/io.hpp"
#include "fwlab/norms.hpp"
#include "fwlab/nullform.hpp"
#include "fwlab/wave.hpp"

namespace fwlab::detail {

namespace {

Json fit_json(const ExponentFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual_rms},
          {"scale_min", f.scale_min}, {"scale_max", f.scale_max}};
}

BuiltMeasure measure_param(Params& p, int points_override = 0) {
  p.resolved["measure"] = p.raw("measure");
  return build_measure(p.raw("measure"), points_override);
}

TimeLaw time_law_param(Params& p) {
  Json law = p.has("time_law") ? p.raw("time_law") : Json{{"kind", "dirac"}, {"t0", 0.0}};
  p.resolved["time_law"] = law;
  const std::string kind = law.value("kind", "dirac");
  if (kind == "dirac") return DiracTime{law.value("t0", 0.0)};
  if (kind == "uniform") return UniformTimeGrid{law.value("count", 8)};
  throw ParameterError("time_law.kind must be dirac or uniform");
}

double spacetime_alpha(const TimeLaw& law, double alpha) {
  return std::holds_alternative<DiracTime>(law) ? alpha : alpha + 1.0;
}

GridField random_band(const GridSpec& g, double rmax, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  GridField c(g, FieldDomain::frequency);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double a = nd(rng), b = nd(rng);
    if (frequency_modulus(g, i) <= rmax) c[i] = {a, b};
  }
  return to_space(c);
}

int log2_ceil(double x) { return static_cast<int>(std::ceil(std::log2(x) - 1e-12)); }

std::string snapshot_path(const std::string& dir, const std::string& tag) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / (tag + ".bin")).string();
}

}  // namespace

ResultRecord run_frostman_audit(Params& p) {
  const BuiltMeasure b = measure_param(p);
  const double alpha = p.number("alpha", b.alpha);
  const auto floors = p.numbers("floors", dyadic(-9, -6));
  std::vector<FrostmanReport> reps(floors.size());
  parallel_for(floors.size(), p.threads(), [&](std::size_t i) { reps[i] = frostman_constant(b.mu, alpha, floors[i]); });

  ResultRecord r;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < floors.size(); ++i) {
    r.samples.push_back({{"floor", floors[i]}, {"constant", reps[i].constant_estimate},
                         {"attained_at_floor", reps[i].attained_at_floor}, {"argmax_radius", reps[i].argmax_radius}});
    lo = std::min(lo, reps[i].constant_estimate);
    hi = std::max(hi, reps[i].constant_estimate);
  }
  r.gates.push_back(make_gate("stability_factor", hi / lo, "<=", p.tolerance("stability_factor", 2.0)));
  if (p.has("tolerances") && p.raw("tolerances").contains("constant_max"))
    r.gates.push_back(make_gate("constant_max", hi, "<=", p.tolerance("constant_max", 0.0)));
  r.extra = {{"alpha", alpha}, {"atoms", b.mu.size()}, {"mass", b.mu.total_mass()}};
  return r;
}

ResultRecord run_lp_bounds(Params& p, const std::string& snapshot_dir) {
  const BuiltMeasure b = measure_param(p);
  const double alpha = p.number("alpha", b.alpha);
  const int k_min = p.integer("k_min", 3), k_max = p.integer("k_max", 8);
  const GridSpec g = choose_grid(p, b.mu, k_max);
  p.resolved["grid"] = {{"N", g.N}, {"L", g.L}};
  const int n = g.n;
  const FrostmanReport fr = frostman_constant(b.mu, alpha, b.floor);
  const auto pieces = lp_decompose(b.mu, k_max, g);

  ResultRecord r;
  std::vector<std::pair<double, double>> pts;
  double worst_slack = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const auto rep = piece_l2_interpolation_check(pieces[k], b.mu.total_mass(), fr);
    pts.emplace_back(std::ldexp(1.0, k), rep.linf);
    worst_slack = std::max(worst_slack, rep.cauchy_schwarz_slack);
    r.samples.push_back({{"k", k}, {"sup", rep.linf}, {"l2", rep.l2}, {"l1", rep.l1},
                         {"cauchy_schwarz_slack", rep.cauchy_schwarz_slack}, {"growth_ratio", rep.growth_ratio}});
    if (!snapshot_dir.empty()) write_snapshot(pieces[k].field, "mu_" + std::to_string(k), snapshot_path(snapshot_dir, "mu_" + std::to_string(k)));
  }
  const ExponentFit fit = fit_exponent(pts);
  r.add_fit(fit);

  GridField sum(g, FieldDomain::space);
  for (const auto& piece : pieces)
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += piece.field[i];
  const GridField low = lowpass_field(b.mu, k_max, g);
  GridField diff = sum;
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= low[i];
  const double recon = sup_norm(diff) / sup_norm(low);

  r.gates.push_back(make_gate("slope_error", std::abs(fit.slope - (n - alpha)), "<=", p.tolerance("slope_error", 0.15)));
  r.gates.push_back(make_gate("reconstruction", recon, "<=", p.tolerance("reconstruction", 1e-10)));
  r.gates.push_back(make_gate("cauchy_schwarz_slack", worst_slack, "<=", 1.0 + 1e-12));
  r.extra = {{"alpha", alpha}, {"target_slope", n - alpha}, {"frostman_constant", fr.constant_estimate},
             {"atoms", b.mu.size()}};
  return r;
}

ResultRecord run_fixed_time_fit(Params& p) {
  const Json spec = p.raw("measure");
  p.resolved["measure"] = spec;
  const bool per_radius = spec.value("kind", "") == "sphere" && !spec.contains("points");
  const auto radii = p.numbers("radii", dyadic(3, 9));
  const BuiltMeasure base = build_measure(spec);
  const double alpha = p.number("alpha", base.alpha);
  const int n = base.mu.dimension();

  ResultRecord r;
  std::vector<std::pair<double, double>> pts;
  for (double R : radii) {
    const int points = per_radius ? std::max(512, static_cast<int>(32 * R)) : 0;
    const BuiltMeasure b = per_radius ? build_measure(spec, points) : base;
    const BandTraceReport rep = band_trace_sup(b.mu, R, 150, 1e-9, static_cast<unsigned>(p.seed()));
    pts.emplace_back(R, rep.ratio);
    r.samples.push_back({{"R", R}, {"atoms", b.mu.size()}, {"ratio", rep.ratio}, {"iterations", rep.iterations},
                         {"ritz_change", rep.ritz_change}});
  }
  const ExponentFit fit = fit_exponent(pts);
  r.add_fit(fit);
  r.gates.push_back(
      make_gate("slope_error", std::abs(fit.slope - (n - alpha) / 2.0), "<=", p.tolerance("slope_error", 0.15)));

  // Fixed-time ratio of a low-frequency bump, and Holder against the L^2 case.
  const double q = p.number("p", 1.5);
  const GridSpec g{n, 64, padded_box_length(base.mu.support_diameter())};
  GridField c(g, FieldDomain::frequency);
  const BumpProfile bump = standard_bump();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = {bump(frequency_modulus(g, i) / 4.0), 0.0};
  const GridField u0 = to_space(c);
  const FrostmanReport fr = frostman_constant(base.mu, alpha, base.floor);
  const double s = (n - alpha) / 2.0;
  const double rq = fixed_time_ratio(u0, base.mu, fr, q, s, 0.5);
  const double r2 = fixed_time_ratio(u0, base.mu, fr, 2.0, s, 0.5);
  r.extra = {{"alpha", alpha}, {"target_slope", s}, {"fixed_time_ratio_p", rq}, {"fixed_time_ratio_2", r2}};
  if (q <= 2.0) r.gates.push_back(make_gate("holder", rq / r2, "<=", 1.0 + 1e-12));
  return r;
}

ResultRecord run_gamma_fit(Params& p) {
  const BuiltMeasure b = measure_param(p);
  const double alpha = p.number("alpha", b.alpha);
  const int k_min = p.integer("k_min", 2), k_max = p.integer("k_max", 6);
  const auto p_list = p.numbers("p_list", {2.0});
  const GridSpec g = choose_grid(p, b.mu, k_max);
  p.resolved["grid"] = {{"N", g.N}, {"L", g.L}};
  const int n = g.n;
  const FrostmanReport fr = frostman_constant(b.mu, alpha, b.floor);

  ResultRecord r;
  Json fits = Json::array();
  for (double q : p_list) {
    const GammaReport rep = estimate_gamma(b.mu, fr, q, k_min, k_max, g);
    for (const auto& s : rep.samples)
      r.samples.push_back({{"p", q}, {"k", s.k}, {"strichartz", s.strichartz}, {"l2", s.l2}, {"h1", s.h1},
                           {"ratio", s.ratio}});
    if (fits.empty()) r.add_fit(rep.fit_l2);
    fits.push_back({{"p", q}, {"fit", fit_json(rep.fit_l2)}, {"fit_sobolev", fit_json(rep.fit_sobolev)},
                    {"gamma", rep.gamma_est}, {"gamma_sobolev", rep.gamma_est_sobolev},
                    {"requirement_met", rep.requirement_met}});
    const std::string tag = p_list.size() > 1 ? "_p" + std::to_string(q).substr(0, 4) : "";
    r.gates.push_back(make_gate("gamma_min" + tag, rep.gamma_est, ">=", p.tolerance("gamma_min", 0.35)));
    r.gates.push_back(make_gate("residual" + tag, rep.fit_l2.residual_rms, "<=", p.tolerance("residual", 0.1)));
  }
  r.extra = {{"alpha", alpha}, {"frostman_constant", fr.constant_estimate}, {"fits", fits}};
  if (alpha <= n) {
    const GammaBound lb = gamma_lower_bound(alpha, n);
    r.extra["table_lower_bound"] = lb.value;
    r.extra["table_source"] = lb.source;
  }
  return r;
}

ResultRecord run_beta_fit(Params& p) {
  const BuiltMeasure b = measure_param(p);
  const double alpha = p.number("alpha", b.alpha);
  const auto radii = p.numbers("radii", dyadic(2, 10));
  const int sphere_points = p.integer("sphere_points", 64);
  const int n = b.mu.dimension();
  const FrostmanReport fr = frostman_constant(b.mu, alpha, b.floor);
  const BetaReport rep = estimate_beta(b.mu, fr, radii, sphere_points);

  ResultRecord r;
  for (std::size_t i = 0; i < radii.size(); ++i) r.samples.push_back({{"R", radii[i]}, {"value", rep.values[i]}});
  r.add_fit(rep.fit);
  if (p.has("beta_target"))
    r.gates.push_back(
        make_gate("beta_error", std::abs(rep.beta - p.number("beta_target", 0.0)), "<=", p.tolerance("beta_error", 0.1)));
  r.gates.push_back(make_gate("residual", rep.fit.residual_rms, "<=", p.tolerance("residual", 0.05)));
  r.extra = {{"alpha", alpha}, {"beta", rep.beta}, {"frostman_constant", fr.constant_estimate},
             {"gamma_from_beta", prop_well(rep.beta, alpha)}};
  if (alpha > 0.0 && alpha <= n) r.extra["spherical_average_criterion"] = mattila_threshold(rep.beta, alpha, n);
  return r;
}

ResultRecord run_cone_fit(Params& p) {
  const BuiltMeasure b = measure_param(p);
  const double alpha = p.number("alpha", b.alpha);
  const TimeLaw law = time_law_param(p);
  const auto radii = p.numbers("radii", dyadic(1, 9));
  const int sphere_points = p.integer("sphere_points", 512);
  const int radial_points = p.integer("radial_points", 128);
  const SpacetimeMeasure nu = product_with_time(b.mu, law);
  std::vector<double> vals(radii.size());
  parallel_for(radii.size(), p.threads(),
               [&](std::size_t i) { vals[i] = cone_decay_norm(nu, radii[i], sphere_points, radial_points); });

  ResultRecord r;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    pts.emplace_back(radii[i], vals[i]);
    r.samples.push_back({{"R", radii[i]}, {"value", vals[i]}});
  }
  const ExponentFit fit = fit_exponent(pts);
  r.add_fit(fit);
  const double decay = -fit.slope;
  r.gates.push_back(make_gate("decay", decay, ">=", alpha - p.tolerance("decay_slack", 0.1)));
  r.extra = {{"alpha", alpha}, {"spacetime_alpha", spacetime_alpha(law, alpha)}, {"decay", decay},
             {"cone_mass", cone_mass(b.mu.dimension())}};
  return r;
}

ResultRecord run_maximal_embed(Params& p) {
  const Json list = p.raw("measures");
  p.resolved["measures"] = list;
  const int k_min = p.integer("k_min", 2), k_max = p.integer("k_max", 5);
  const double q = p.number("p", 2.0);
  const double slack = p.tolerance("embedding_slack", 0.15);

  ResultRecord r;
  Json fits = Json::array();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < list.size(); ++m) {
    const BuiltMeasure b = build_measure(list[m]);
    const GridSpec g = choose_grid(p, b.mu, k_max);
    const FrostmanReport fr = frostman_constant(b.mu, b.alpha, b.floor);
    const GammaReport rep = estimate_gamma(b.mu, fr, q, k_min, k_max, g, true);
    for (const auto& s : rep.samples)
      r.samples.push_back({{"measure", static_cast<int>(m)}, {"k", s.k}, {"strichartz", s.strichartz},
                           {"maximal", s.maximal}, {"l2", s.l2}});
    const double margin = rep.fit_maximal.slope - (rep.fit_l2.slope + 1.0 / q);
    worst = std::max(worst, margin);
    fits.push_back({{"measure", static_cast<int>(m)}, {"alpha", b.alpha}, {"grid", {{"N", g.N}, {"L", g.L}}},
                    {"strichartz_slope", rep.fit_l2.slope}, {"maximal_slope", rep.fit_maximal.slope}, {"margin", margin}});
    r.gates.push_back(make_gate("embedding_" + std::to_string(m), margin, "<=", slack));
  }
  r.extra = {{"fits", fits}, {"worst_margin", worst}};
  return r;
}

ResultRecord run_distance_density(Params& p) {
  const BuiltMeasure b = measure_param(p);
  const double alpha = p.number("alpha", b.alpha);
  const int n = b.mu.dimension();
  const double lambda = p.has("lambda") ? p.number("lambda", 0.0) : p.number("lambda", default_lambda(alpha, n));
  const int bins = p.integer("bins", 64);
  const DistanceDensity h = pushforward(b.mu, lambda, bins);
  const auto ref = density_refinement(b.mu, lambda, bins);

  ResultRecord r;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double w = h.bin_edges[i + 1] - h.bin_edges[i];
    r.samples.push_back({{"bin_center", 0.5 * (h.bin_edges[i] + h.bin_edges[i + 1])}, {"mass", h.masses[i]},
                         {"density", h.masses[i] / w}});
  }
  r.gates.push_back(make_gate("refinement_growth", ref[2] / ref[0], "<=", p.tolerance("refinement_growth", 2.0)));
  r.extra = {{"alpha", alpha}, {"total", h.total}, {"skipped_mass", h.skipped_mass},
             {"max_density", {ref[0], ref[1], ref[2]}}};
  return r;
}

ResultRecord run_falconer_lattice_sweep(Params& p) {
  const auto qs = p.integers("q", {8, 16, 32, 64});
  const double alpha = p.number("alpha", 1.0);
  const int n = p.integer("n", 2);
  std::vector<double> radius(qs.size()), measure(qs.size());
  parallel_for(qs.size(), p.threads(), [&](std::size_t i) {
    radius[i] = falconer_radius(qs[i], alpha, n);
    measure[i] = distance_set_measure(build_falconer_lattice(qs[i], alpha, n), radius[i]);
  });

  ResultRecord r;
  double worst = 0.0;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    r.samples.push_back({{"q", qs[i]}, {"radius", radius[i]}, {"distance_set_measure", measure[i]}});
    if (i > 0) worst = std::max(worst, measure[i] / measure[i - 1]);
  }
  if (qs.size() > 1) r.gates.push_back(make_gate("decrease_ratio", worst, "<", 1.0));
  r.extra = {{"dimension", n / alpha}};
  return r;
}

ResultRecord run_exponent_atlas(Params& p) {
  const int n = p.integer("n", 2);
  const double q = p.number("p", 2.0);
  const auto grid = p.numbers("alpha_grid", {0.01, 3.0, 0.01});
  if (!(grid[2] > 0.0)) throw ParameterError("alpha_grid step must be positive");
  if (n < 2) throw RangeError("the exponent atlas needs n >= 2");

  std::vector<double> ps{q};
  if (p.has("p_grid")) {
    const auto pg = p.numbers("p_grid", {});
    if (!(pg[2] > 0.0)) throw ParameterError("p_grid step must be positive");
    ps.clear();
    const long pc = std::lround(std::floor((pg[1] - pg[0]) / pg[2] + 1e-9)) + 1;
    for (long j = 0; j < pc; ++j) ps.push_back(pg[0] + j * pg[2]);
  }

  ResultRecord r;
  const long count = std::lround(std::floor((grid[1] - grid[0]) / grid[2] + 1e-9)) + 1;
  for (double pp : ps)
    for (long i = 0; i < count; ++i) {
      double a = grid[0] + i * grid[2];
      if (!(a > 0.0 && a <= n + 1.0 + 1e-9)) continue;
      a = std::min(a, n + 1.0);
      Json row{{"alpha", a}};
      if (ps.size() > 1) row["p"] = pp;
      row["s_necessary"] = s_necessary(a, pp, n);
      const auto suff = sufficient_s(a, pp, n);
      row["s_sufficient"] = suff ? Json(*suff) : Json(nullptr);
      row["new_necessary"] = pp >= 1.0 && pp <= 2.0 ? Json(new_necessary(a, pp, n)) : Json(nullptr);
      if (a <= n + 1e-9) {
        const GammaBound lb = gamma_lower_bound(std::min(a, static_cast<double>(n)), n);
        row["gamma_lower_bound"] = lb.value;
        row["gamma_source"] = lb.source;
      } else {
        row["gamma_lower_bound"] = nullptr;
        row["gamma_source"] = "";
      }
      r.samples.push_back(std::move(row));
    }

  // Seams of s_necessary at alpha = 1 and alpha = n.
  double seam = 0.0;
  for (int m : {2, 3, n})
    for (double a0 : {1.0, static_cast<double>(m)})
      for (double pp : {1.0, 1.5, 2.0, 3.0, q}) {
        const double mid = s_necessary(a0, pp, m);
        seam = std::max({seam, std::abs(s_necessary(a0 - 1e-12, pp, m) - mid),
                         std::abs(s_necessary(std::min(a0 + 1e-12, m + 1.0), pp, m) - mid)});
      }
  r.gates.push_back(make_gate("seam", seam, "<=", p.tolerance("seam", 1e-9)));

  // Largest p with a nonempty new-condition region, by bisection.
  double cutoff = 0.0;
  Json cutoffs = Json::array();
  for (const auto& [m, expected] : {std::pair{2, 4.0 / 3.0}, std::pair{3, 8.0 / 5.0}}) {
    double lo = 1.0, hi = 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (new_condition_region(mid, m).empty ? hi : lo) = mid;
    }
    cutoff = std::max(cutoff, std::abs(lo - expected));
    cutoffs.push_back({{"n", m}, {"p_cutoff", lo}, {"expected", expected}});
  }
  r.gates.push_back(make_gate("cutoff", cutoff, "<=", p.tolerance("cutoff", 1e-9)));

  // Adjacent table rows meet at their common endpoints.
  double table = 0.0;
  for (int m : {2, 3, n})
    for (double a0 : {(m - 1) / 2.0, m / 2.0}) {
      const auto rows = gamma_table_rows(a0, m);
      table = std::max(table, std::abs(rows[0].value - rows[1].value));
    }
  r.gates.push_back(make_gate("table_seam", table, "<=", p.tolerance("table_seam", 1e-9)));

  // gamma = (beta + 1 - alpha)/2 fed into the smoothing criterion reproduces beta >= n - alpha.
  double pass = 0.0;
  int mismatches = 0;
  for (int m = 2; m <= 5; ++m)
    for (int ia = 1; ia < 40; ++ia) {
      const double a = (m - 1) / 2.0 + ia / 40.0;
      for (int ib = 0; ib <= 80; ++ib) {
        const double beta = m * ib / 80.0;
        const double g = prop_well(beta, a);
        pass = std::max(pass, std::abs((g - ((m + 1) / 2.0 - a)) - (beta - (m - a)) / 2.0));
        if (std::abs(beta - (m - a)) > 1e-12 && wells_condition(g, a, m) != mattila_threshold(beta, a, m)) ++mismatches;
      }
    }
  r.gates.push_back(make_gate("pass_through", pass, "<=", p.tolerance("pass_through", 1e-12)));
  r.gates.push_back(make_gate("pass_through_mismatches", mismatches, "<=", 0.0));

  Json region = Json::array();
  for (int i = 0; i <= 20; ++i) {
    const double pp = 1.0 + i * 0.05;
    const AlphaInterval iv = new_condition_region(pp, n);
    region.push_back({{"p", pp}, {"empty", iv.empty}, {"lo", iv.lo}, {"hi", iv.hi}});
  }
  r.extra = {{"cutoffs", cutoffs}, {"region", region}};
  return r;
}

ResultRecord run_nullform_suite(Params& p) {
  const GridSpec g = [&] {
    if (p.has("grid")) return GridSpec{2, p.raw("grid")["N"].get<int>(), p.raw("grid")["L"].get<double>()};
    return GridSpec{2, 256, 8.0};
  }();
  p.resolved["grid"] = {{"N", g.N}, {"L", g.L}};
  const int trials = p.integer("trials", 20);
  const double band = p.number("band", 7.0);
  const int leibniz_trials = p.integer("leibniz_trials", 20);
  std::mt19937_64 rng(p.seed());
  std::uniform_real_distribution<double> ut(0.0, 1.0);

  ResultRecord r;
  double worst_rel = 0.0, worst_mean = 0.0;
  for (int i = 0; i < trials; ++i) {
    const GridField u0 = random_band(g, band, rng);
    const double t = ut(rng);
    const NullIdentityReport rep = null_identity_check(u0, t);
    worst_rel = std::max(worst_rel, rep.relative);
    worst_mean = std::max(worst_mean, rep.mean_relative);
    r.samples.push_back({{"check", "identity"}, {"trial", i}, {"t", t}, {"relative", rep.relative},
                         {"mean_relative", rep.mean_relative}});
  }
  r.gates.push_back(make_gate("identity", worst_rel, "<=", p.tolerance("identity", 1e-6)));
  r.gates.push_back(make_gate("mean", worst_mean, "<=", p.tolerance("mean", 1e-10)));

  const GridSpec lg{2, 64, 4.0};
  double worst_leibniz = 0.0;
  for (int i = 0; i < leibniz_trials; ++i) {
    const GridField a = random_band(lg, 3.0, rng), c = random_band(lg, 3.0, rng);
    for (double s : {0.5, 1.0, 1.5}) {
      const LeibnizReport rep = fractional_leibniz_check(a, c, s);
      worst_leibniz = std::max(worst_leibniz, rep.ratio);
      r.samples.push_back({{"check", "leibniz"}, {"trial", i}, {"s", s}, {"ratio", rep.ratio}});
    }
  }
  r.gates.push_back(make_gate("leibniz", worst_leibniz, "<=", p.tolerance("leibniz", 4.0)));

  if (p.has("measure")) {
    const BuiltMeasure b = measure_param(p);
    const double alpha = p.number("alpha", b.alpha);
    const int n = b.mu.dimension();
    const FrostmanReport fr = frostman_constant(b.mu, alpha, b.floor);
    const double L = padded_box_length(b.mu.support_diameter());
    const GridSpec coarse{n, n == 2 ? 64 : 16, L};
    const WeightRefinement wr = weight_refinement(b.mu, coarse, n == 2 ? 3 : 2);
    const double ap = alpha / 2.0;
    const RieszBoundReport r1 = riesz_bound_check(b.mu, fr, ap, coarse);
    const RieszBoundReport r2 = riesz_bound_check(b.mu, fr, ap, GridSpec{n, 2 * coarse.N, L}, r1.floor);
    r.gates.push_back(make_gate("riesz_refinement", std::abs(r2.worst_constant / r1.worst_constant - 1.0), "<=",
                                p.tolerance("riesz_refinement", 0.2)));
    r.gates.push_back(make_gate("riesz_far_field", r2.far_within_mass ? 0.0 : 1.0, "<=", 0.0));
    r.extra = {{"alpha", alpha},
               {"weight_sup", wr.sup},
               {"weight_growth", wr.growth},
               {"weight_unbounded", wr.unbounded},
               {"riesz_alpha_prime", ap},
               {"riesz_constant", {r1.worst_constant, r2.worst_constant}},
               {"riesz_dyadic_constant", r2.dyadic_constant}};
    if (n == 3 && alpha > 0.0 && alpha <= n - 2) {
      const int k_min = p.integer("k_min", 0), k_max = p.integer("k_max", 2);
      const GridSpec gg = choose_grid(p, b.mu, k_max, 0.5);
      const GammaStarReport gs = estimate_gamma_star(b.mu, fr, k_min, k_max, gg);
      const GammaReport gr = estimate_gamma(b.mu, fr, 2.0, k_min, k_max, gg);
      for (const auto& s : gs.samples)
        r.samples.push_back({{"check", "gamma_star"}, {"k", s.k}, {"functional", s.functional},
                             {"boundary_term", s.boundary_term}, {"l2", s.l2}});
      r.extra["gamma_star"] = gs.gamma_star;
      r.extra["gamma_star_fit"] = fit_json(gs.fit);
      r.extra["gamma"] = gr.gamma_est;
      r.gates.push_back(make_gate("consistency", prop_nullform(gs.gamma_star) - gr.gamma_est, "<=",
                                  p.tolerance("consistency", 0.2)));
    }
  }
  return r;
}

ResultRecord run_weak_type_chain(Params& p, const std::string& snapshot_dir) {
  const BuiltMeasure b = measure_param(p);
  const double alpha = p.number("alpha", b.alpha);
  const TimeLaw law = time_law_param(p);
  const auto radii = p.numbers("radii", {16.0, 32.0, 64.0});
  const double q = p.number("lq_exponent", 2.0);
  const double rmax = *std::max_element(radii.begin(), radii.end());
  const GridSpec g = choose_grid(p, b.mu, log2_ceil(2.0 * rmax));
  p.resolved["grid"] = {{"N", g.N}, {"L", g.L}};
  const SpacetimeMeasure nu = product_with_time(b.mu, law);
  const FrostmanReport fr = frostman_constant(b.mu, alpha, b.floor);

  ResultRecord r;
  double worst_layer = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  int violations = 0;
  for (double R : radii) {
    GridField f = measure_spectrum(b.mu, g, 2.0 * R);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (frequency_modulus(g, i) < R || frequency_modulus(g, i) >= 2.0 * R) f[i] = {0.0, 0.0};
    if (!snapshot_dir.empty()) {
      const std::string tag = "f_R" + std::to_string(static_cast<long>(R));
      write_snapshot(f, tag, snapshot_path(snapshot_dir, tag));
    }
    const WeakTypeReport rep = weak_type_check(f, R, nu, fr, {}, q);
    worst_layer = std::max(worst_layer, rep.layer_cake_error);
    lo = std::min(lo, rep.worst_constant);
    hi = std::max(hi, rep.worst_constant);
    if (rep.cap_violated) ++violations;
    r.samples.push_back({{"R", R}, {"sup_u", rep.sup_u}, {"bernstein_cap", rep.bernstein_cap},
                         {"bernstein_constant", rep.bernstein_constant}, {"worst_constant", rep.worst_constant},
                         {"lq_direct", rep.lq_direct}, {"lq_layer_cake", rep.lq_layer_cake},
                         {"layer_cake_error", rep.layer_cake_error}});
  }
  r.gates.push_back(make_gate("cap_violations", violations, "<=", 0.0));
  r.gates.push_back(make_gate("layer_cake", worst_layer, "<=", p.tolerance("layer_cake", 0.02)));
  r.gates.push_back(make_gate("constant_stability", hi / lo, "<=", p.tolerance("constant_stability", 2.0)));
  r.extra = {{"alpha", alpha}, {"spacetime_alpha", spacetime_alpha(law, alpha)},
             {"frostman_constant", fr.constant_estimate}};
  return r;
}

}  // namespace fwlab::detail
