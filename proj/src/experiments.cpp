#include "fwlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "experiment_detail.hpp"
#include "fwlab/error.hpp"
#include "fwlab/io.hpp"

namespace fwlab {

namespace {

enum class Kind { integer, number, boolean, string, integer_list, number_list, range, object, measure, measure_list };

struct KeySpec {
  const char* name;
  Kind kind;
  const char* help;
};

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::integer: return "integer";
    case Kind::number: return "number";
    case Kind::boolean: return "boolean";
    case Kind::string: return "string";
    case Kind::integer_list: return "integer list";
    case Kind::number_list: return "number list";
    case Kind::range: return "range [lo, hi, step]";
    case Kind::object: return "object";
    case Kind::measure: return "measure object";
    case Kind::measure_list: return "list of measure objects";
  }
  return "";
}

const std::vector<KeySpec>& common_keys() {
  static const std::vector<KeySpec> keys{
      {"experiment", Kind::string, "experiment name"},
      {"seed", Kind::integer, "seed for all randomized data"},
      {"out", Kind::string, "output directory"},
      {"threads", Kind::integer, "worker threads for independent sweep points"},
      {"tolerances", Kind::object, "gate bounds by gate name"},
      {"snapshots", Kind::boolean, "write GridField snapshots under fields/"},
  };
  return keys;
}

const std::vector<KeySpec>& measure_keys() {
  static const std::vector<KeySpec> keys{
      {"kind", Kind::string, "cantor | sphere | uniform | lattice | atom | file"},
      {"n", Kind::integer, "ambient dimension"},
      {"ratio", Kind::number, "cantor contraction ratio"},
      {"alpha", Kind::number, "cantor or lattice dimension parameter"},
      {"depth", Kind::integer, "cantor generations"},
      {"points", Kind::integer, "sphere atom count"},
      {"radius", Kind::number, "sphere radius"},
      {"m", Kind::integer, "uniform grid atoms per axis"},
      {"q", Kind::integer, "lattice spacing 1/q"},
      {"path", Kind::string, "measure JSON file"},
      {"center", Kind::boolean, "translate the bounding box centre to the origin"},
      {"even", Kind::boolean, "symmetrize x -> -x"},
      {"floor", Kind::number, "finest scale for the growth-constant audit"},
  };
  return keys;
}

struct ExperimentSpec {
  std::string anchor;
  bool needs_measure;
  std::vector<KeySpec> keys;
  std::map<std::string, double> tolerances;
};

const KeySpec kMeasure{"measure", Kind::measure, "measure to study"};
const KeySpec kAlpha{"alpha", Kind::number, "Frostman exponent (defaults to the construction's dimension)"};
const KeySpec kGrid{"grid", Kind::object, "{\"N\": int, \"L\": number}; chosen automatically when absent"};
const KeySpec kKmin{"k_min", Kind::integer, "first dyadic band"};
const KeySpec kKmax{"k_max", Kind::integer, "last dyadic band"};
const KeySpec kRadii{"radii", Kind::number_list, "frequency scales R"};
const KeySpec kTcount{"T_count", Kind::integer, "time samples on [0,1] (0 = automatic)"};
const KeySpec kTimeLaw{"time_law", Kind::object, "{\"kind\": \"dirac\", \"t0\": t} or {\"kind\": \"uniform\", \"count\": c}"};

const std::map<std::string, ExperimentSpec>& registry() {
  static const std::map<std::string, ExperimentSpec> r{
      {"frostman-audit",
       {"growth condition mu(B(x,r)) <= C r^alpha", true,
        {kMeasure, kAlpha, {"floors", Kind::number_list, "finest audit scales"}},
        {{"stability_factor", 2.0}}}},
      {"lp-bounds",
       {"dyadic sup bound ||mu_k||_inf <~ 2^(k(n-alpha)) and L2 interpolation", true,
        {kMeasure, kAlpha, kGrid, kKmin, kKmax},
        {{"slope_error", 0.15}, {"reconstruction", 1e-10}}}},
      {"fixed-time-fit",
       {"trace lemma ||f||_L2(mu) <~ R^((n-alpha)/2) ||f||_2 for band-R data", true,
        {kMeasure, kAlpha, kRadii, {"p", Kind::number, "Lebesgue exponent for the fixed-time ratio"}, kGrid},
        {{"slope_error", 0.15}}}},
      {"gamma-fit",
       {"local smoothing exponent gamma_n(alpha), row alpha <= (n-1)/2 of the lower-bound table", true,
        {kMeasure, kAlpha, kGrid, kKmin, kKmax, {"p_list", Kind::number_list, "Lebesgue exponents"}},
        {{"gamma_min", 0.35}, {"residual", 0.1}}}},
      {"beta-fit",
       {"spherical average decay beta_n(alpha) and the implication beta >= n - alpha", true,
        {kMeasure, kAlpha, kRadii, {"sphere_points", Kind::integer, "quadrature points on the unit sphere"},
         {"beta_target", Kind::number, "expected decay exponent"}},
        {{"beta_error", 0.1}, {"residual", 0.05}}}},
      {"cone-fit",
       {"cone average decay of space-time measures", true,
        {kMeasure, kAlpha, kRadii, kTimeLaw, {"sphere_points", Kind::integer, "angular quadrature points"},
         {"radial_points", Kind::integer, "radial quadrature points on [1,2)"}},
        {{"decay_slack", 0.1}}}},
      {"maximal-embed",
       {"Strichartz-to-maximal embedding s' > s + 1/p", false,
        {{"measures", Kind::measure_list, "test measures"}, kKmin, kKmax, {"p", Kind::number, "Lebesgue exponent"}},
        {{"embedding_slack", 0.15}}}},
      {"distance-density",
       {"weighted distance push-forward nu_lambda and its density", true,
        {kMeasure, kAlpha, {"lambda", Kind::number, "weight exponent"}, {"bins", Kind::integer, "histogram bins"}},
        {{"refinement_growth", 2.0}}}},
      {"falconer-lattice-sweep",
       {"lattice sets of dimension n/alpha with shrinking distance sets", false,
        {{"q", Kind::integer_list, "lattice parameters"}, kAlpha, {"n", Kind::integer, "dimension"}},
        {}}},
      {"exponent-atlas",
       {"necessary and sufficient Sobolev exponents, new necessary region, gamma lower-bound table", false,
        {{"n", Kind::integer, "dimension"}, {"p", Kind::number, "Lebesgue exponent"},
         {"alpha_grid", Kind::range, "alpha sweep"}, {"p_grid", Kind::range, "p sweep (replaces p)"}},
        {{"seam", 1e-9}, {"cutoff", 1e-9}, {"table_seam", 1e-9}, {"pass_through", 1e-12}}}},
      {"nullform-suite",
       {"null-form identity, inverse-Laplacian weight, gamma*, Riesz bound, fractional Leibniz", false,
        {kGrid, {"trials", Kind::integer, "random data for the identity"},
         {"band", Kind::number, "frequency radius of random data"},
         {"leibniz_trials", Kind::integer, "random pairs for the Leibniz ratio"}, kMeasure, kAlpha, kKmin, kKmax},
        {{"identity", 1e-6}, {"mean", 1e-10}, {"leibniz", 4.0}, {"consistency", 0.2}, {"riesz_refinement", 0.2}}}},
      {"weak-type-chain",
       {"weak (2,2) bound, Bernstein cap and layer-cake reconstruction", true,
        {kMeasure, kAlpha, kRadii, kTimeLaw, {"lq_exponent", Kind::number, "exponent q of the layer-cake norm"}},
        {{"layer_cake", 0.02}, {"constant_stability", 2.0}}}},
  };
  return r;
}

bool matches(Kind k, const Json& v) {
  auto all = [&](auto pred) {
    if (!v.is_array()) return false;
    for (const auto& e : v)
      if (!pred(e)) return false;
    return true;
  };
  switch (k) {
    case Kind::integer: return v.is_number_integer();
    case Kind::number: return v.is_number();
    case Kind::boolean: return v.is_boolean();
    case Kind::string: return v.is_string();
    case Kind::integer_list: return all([](const Json& e) { return e.is_number_integer(); });
    case Kind::number_list: return all([](const Json& e) { return e.is_number(); });
    case Kind::range: return v.is_array() && v.size() == 3 && all([](const Json& e) { return e.is_number(); });
    case Kind::object:
    case Kind::measure: return v.is_object();
    case Kind::measure_list: return all([](const Json& e) { return e.is_object(); });
  }
  return false;
}

void check_measure(const Json& m, const std::string& where, std::vector<std::string>& out) {
  for (const auto& [key, value] : m.items()) {
    const auto& keys = measure_keys();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& s) { return key == s.name; });
    if (it == keys.end())
      out.push_back(where + ": unknown key \"" + key + "\"");
    else if (!matches(it->kind, value))
      out.push_back(where + "." + key + ": expected " + kind_name(it->kind));
  }
  static const std::vector<std::string> kinds{"cantor", "sphere", "uniform", "lattice", "atom", "file"};
  if (!m.contains("kind") || !m["kind"].is_string())
    out.push_back(where + ": missing \"kind\"");
  else if (std::find(kinds.begin(), kinds.end(), m["kind"].get<std::string>()) == kinds.end())
    out.push_back(where + ": unknown kind \"" + m["kind"].get<std::string>() + "\"");
  else if (m["kind"] == "file" && !m.contains("path"))
    out.push_back(where + ": file measure needs \"path\"");
  else if (m["kind"] == "cantor" && !m.contains("ratio") && !m.contains("alpha"))
    out.push_back(where + ": cantor measure needs \"ratio\" or \"alpha\"");
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "frostman-audit", "lp-bounds",        "fixed-time-fit",         "gamma-fit",
      "beta-fit",       "cone-fit",         "maximal-embed",          "distance-density",
      "falconer-lattice-sweep", "exponent-atlas", "nullform-suite", "weak-type-chain"};
  return names;
}

Json config_schema() {
  auto describe = [](const std::vector<KeySpec>& keys) {
    Json o = Json::object();
    for (const auto& k : keys) o[k.name] = {{"type", kind_name(k.kind)}, {"help", k.help}};
    return o;
  };
  Json ex = Json::object();
  for (const auto& name : experiment_names()) {
    const ExperimentSpec& s = registry().at(name);
    Json tol = Json::object();
    for (const auto& [g, v] : s.tolerances) tol[g] = v;
    ex[name] = {{"anchor", s.anchor}, {"requires_measure", s.needs_measure}, {"keys", describe(s.keys)}, {"tolerances", tol}};
  }
  return {{"version", kConfigSchemaVersion}, {"common", describe(common_keys())}, {"measure", describe(measure_keys())},
          {"experiments", ex}};
}

std::vector<std::string> validate_config(const Json& config) {
  std::vector<std::string> out;
  if (!config.is_object()) return {"config must be a JSON object"};
  if (!config.contains("experiment") || !config["experiment"].is_string()) return {"missing \"experiment\""};
  const std::string name = config["experiment"].get<std::string>();
  const auto it = registry().find(name);
  if (it == registry().end()) return {"unknown experiment \"" + name + "\""};
  const ExperimentSpec& spec = it->second;

  for (const auto& [key, value] : config.items()) {
    const KeySpec* ks = nullptr;
    for (const auto& k : common_keys())
      if (key == k.name) ks = &k;
    for (const auto& k : spec.keys)
      if (key == k.name) ks = &k;
    if (!ks) {
      out.push_back("unknown key \"" + key + "\" for " + name);
      continue;
    }
    if (!matches(ks->kind, value)) {
      out.push_back("\"" + key + "\": expected " + kind_name(ks->kind));
      continue;
    }
    if (ks->kind == Kind::measure) check_measure(value, key, out);
    if (ks->kind == Kind::measure_list)
      for (std::size_t i = 0; i < value.size(); ++i) check_measure(value[i], key + "[" + std::to_string(i) + "]", out);
  }
  if (spec.needs_measure && !config.contains("measure")) out.push_back("missing measure spec (\"measure\")");
  if (name == "maximal-embed" && !config.contains("measures")) out.push_back("missing measure list (\"measures\")");
  if (config.contains("tolerances") && config["tolerances"].is_object())
    for (const auto& [g, v] : config["tolerances"].items()) {
      const bool known = spec.tolerances.count(g) || (name == "frostman-audit" && g == "constant_max");
      if (!known) out.push_back("unknown tolerance \"" + g + "\" for " + name);
      if (!v.is_number()) out.push_back("tolerance \"" + g + "\" must be a number");
    }
  if (config.contains("grid") && config["grid"].is_object()) {
    const Json& g = config["grid"];
    for (const auto& [k, v] : g.items())
      if (k != "N" && k != "L") out.push_back("grid: unknown key \"" + k + "\"");
    if (!g.contains("N") || !g["N"].is_number_integer()) out.push_back("grid.N: expected integer");
    if (!g.contains("L") || !g["L"].is_number()) out.push_back("grid.L: expected number");
  }
  if (config.contains("threads") && config["threads"].is_number_integer() && config["threads"].get<int>() < 1)
    out.push_back("\"threads\" must be at least 1");
  return out;
}

Json default_config(const std::string& experiment) {
  const Json cantor_half{{"kind", "cantor"}, {"n", 2}, {"alpha", 0.5}, {"depth", 3}, {"center", true}, {"even", true}};
  Json c{{"experiment", experiment}, {"seed", 1}};
  if (experiment == "frostman-audit") {
    c["measure"] = {{"kind", "cantor"}, {"n", 1}, {"ratio", 1.0 / 3.0}, {"depth", 8}};
  } else if (experiment == "lp-bounds") {
    c["measure"] = {{"kind", "cantor"}, {"n", 2}, {"alpha", 1.0}, {"depth", 5}, {"center", true}};
    c["grid"] = {{"N", 2048}, {"L", 2.0}};
    c["k_min"] = 3;
    c["k_max"] = 8;
  } else if (experiment == "fixed-time-fit") {
    c["measure"] = {{"kind", "sphere"}, {"n", 2}};
    c["radii"] = detail::dyadic(3, 9);
  } else if (experiment == "gamma-fit") {
    c["measure"] = cantor_half;
    c["k_min"] = 2;
    c["k_max"] = 6;
  } else if (experiment == "beta-fit") {
    c["measure"] = {{"kind", "sphere"}, {"n", 2}, {"points", 16384}};
    c["radii"] = detail::dyadic(2, 10);
    c["beta_target"] = 1.0;
  } else if (experiment == "cone-fit") {
    c["measure"] = {{"kind", "cantor"}, {"n", 2}, {"alpha", 0.5}, {"depth", 3}, {"center", true}};
    c["radii"] = detail::dyadic(1, 9);
  } else if (experiment == "maximal-embed") {
    c["measures"] = Json::array({cantor_half,
                                 {{"kind", "cantor"}, {"n", 2}, {"alpha", 1.0}, {"depth", 3}, {"center", true}, {"even", true}},
                                 {{"kind", "uniform"}, {"n", 2}, {"m", 16}, {"center", true}, {"even", true}}});
    c["k_min"] = 2;
    c["k_max"] = 5;
  } else if (experiment == "distance-density") {
    c["measure"] = {{"kind", "cantor"}, {"n", 2}, {"alpha", 1.5}, {"depth", 4}};
  } else if (experiment == "falconer-lattice-sweep") {
    c["q"] = {8, 16, 32, 64};
    c["alpha"] = 1.0;
    c["n"] = 2;
  } else if (experiment == "exponent-atlas") {
    c["n"] = 2;
    c["p"] = 2.0;
    c["alpha_grid"] = {0.01, 3.0, 0.01};
  } else if (experiment == "nullform-suite") {
    c["grid"] = {{"N", 256}, {"L", 8.0}};
  } else if (experiment == "weak-type-chain") {
    c["measure"] = {{"kind", "sphere"}, {"n", 2}, {"points", 1024}};
    c["radii"] = {16.0, 32.0, 64.0};
  } else {
    throw ParameterError("unknown experiment \"" + experiment + "\"");
  }
  return c;
}

ResultRecord run_experiment(const Json& config, const std::string& snapshot_dir) {
  const auto diag = validate_config(config);
  if (!diag.empty()) {
    std::string msg = "invalid config:";
    for (const auto& d : diag) msg += "\n  " + d;
    throw ParameterError(msg);
  }
  const std::string name = config["experiment"].get<std::string>();
  detail::Params p(config);
  const std::string snaps = config.value("snapshots", false) ? snapshot_dir : std::string();
  ResultRecord r;
  if (name == "frostman-audit") r = detail::run_frostman_audit(p);
  if (name == "lp-bounds") r = detail::run_lp_bounds(p, snaps);
  if (name == "fixed-time-fit") r = detail::run_fixed_time_fit(p);
  if (name == "gamma-fit") r = detail::run_gamma_fit(p);
  if (name == "beta-fit") r = detail::run_beta_fit(p);
  if (name == "cone-fit") r = detail::run_cone_fit(p);
  if (name == "maximal-embed") r = detail::run_maximal_embed(p);
  if (name == "distance-density") r = detail::run_distance_density(p);
  if (name == "falconer-lattice-sweep") r = detail::run_falconer_lattice_sweep(p);
  if (name == "exponent-atlas") r = detail::run_exponent_atlas(p);
  if (name == "nullform-suite") r = detail::run_nullform_suite(p);
  if (name == "weak-type-chain") r = detail::run_weak_type_chain(p, snaps);
  r.experiment = name;
  r.anchor = registry().at(name).anchor;
  Json params = p.resolved;
  if (config.contains("seed")) params["seed"] = config["seed"];
  r.params = std::move(params);
  return r;
}

namespace detail {

double Params::number(const std::string& key, double fallback) {
  const double v = config_.contains(key) ? config_[key].get<double>() : fallback;
  resolved[key] = v;
  return v;
}

int Params::integer(const std::string& key, int fallback) {
  const int v = config_.contains(key) ? config_[key].get<int>() : fallback;
  resolved[key] = v;
  return v;
}

bool Params::boolean(const std::string& key, bool fallback) {
  const bool v = config_.contains(key) ? config_[key].get<bool>() : fallback;
  resolved[key] = v;
  return v;
}

std::vector<double> Params::numbers(const std::string& key, std::vector<double> fallback) {
  std::vector<double> v = config_.contains(key) ? config_[key].get<std::vector<double>>() : std::move(fallback);
  resolved[key] = v;
  return v;
}

std::vector<int> Params::integers(const std::string& key, std::vector<int> fallback) {
  std::vector<int> v = config_.contains(key) ? config_[key].get<std::vector<int>>() : std::move(fallback);
  resolved[key] = v;
  return v;
}

double Params::tolerance(const std::string& name, double fallback) {
  double v = fallback;
  if (config_.contains("tolerances") && config_["tolerances"].contains(name)) v = config_["tolerances"][name].get<double>();
  if (!resolved.contains("tolerances")) resolved["tolerances"] = Json::object();
  resolved["tolerances"][name] = v;
  return v;
}

std::vector<double> dyadic(int lo, int hi) {
  std::vector<double> v;
  for (int k = lo; k <= hi; ++k) v.push_back(std::ldexp(1.0, k));
  return v;
}

BuiltMeasure build_measure(const Json& spec, int points_override) {
  const std::string kind = spec.at("kind").get<std::string>();
  const int n = spec.value("n", 2);
  BuiltMeasure b;
  b.label = kind;
  if (kind == "cantor") {
    const double ratio = spec.contains("ratio") ? spec["ratio"].get<double>()
                                                : cantor_ratio_for_dimension(spec["alpha"].get<double>(), n);
    const int depth = spec.value("depth", 4);
    b.mu = build_cantor_product(ratio, depth, n);
    b.alpha = cantor_dimension(ratio, n);
    b.floor = std::pow(ratio, depth);
  } else if (kind == "sphere") {
    const int points = points_override > 0 ? points_override : spec.value("points", 4096);
    const double radius = spec.value("radius", 1.0);
    b.mu = build_sphere_measure(radius, n, points);
    b.alpha = n - 1.0;
    b.floor = 2.0 * std::numbers::pi * radius / points;
  } else if (kind == "uniform") {
    const int m = spec.value("m", 32);
    b.mu = build_uniform_grid(m, n);
    b.alpha = n;
    b.floor = 1.0 / m;
  } else if (kind == "lattice") {
    const int q = spec.value("q", 8);
    const double a = spec.value("alpha", 1.0);
    b.mu = build_falconer_lattice(q, a, n);
    b.alpha = a;
    b.floor = 1.0 / q;
  } else if (kind == "atom") {
    b.mu = AtomicMeasure(n, std::vector<double>(n, 0.0), {1.0}, true);
    b.alpha = 0.0;
    b.floor = 1e-3;
  } else {
    b.mu = read_measure(spec.at("path").get<std::string>());
    b.alpha = spec.value("alpha", 0.0);
    b.floor = 1e-3;
  }
  if (spec.contains("floor")) b.floor = spec["floor"].get<double>();
  if (spec.value("center", false) && !b.mu.empty()) {
    const int d = b.mu.dimension();
    std::vector<double> lo(d, INFINITY), hi(d, -INFINITY);
    for (std::size_t j = 0; j < b.mu.size(); ++j)
      for (int a = 0; a < d; ++a) {
        lo[a] = std::min(lo[a], b.mu.point(j)[a]);
        hi[a] = std::max(hi[a], b.mu.point(j)[a]);
      }
    std::vector<double> shift(d);
    for (int a = 0; a < d; ++a) shift[a] = -0.5 * (lo[a] + hi[a]);
    b.mu = translate(b.mu, shift);
  }
  if (spec.value("even", false)) b.mu = evenize(b.mu);
  return b;
}

GridSpec choose_grid(const Params& p, const AtomicMeasure& mu, int k_max, double nyquist_factor) {
  const int n = mu.dimension();
  if (p.has("grid")) {
    const Json& g = p.raw("grid");
    return GridSpec{n, g["N"].get<int>(), g["L"].get<double>()};
  }
  const double L = padded_box_length(mu.support_diameter());
  int N = 4;
  while (!(std::ldexp(1.0, k_max) < nyquist_factor * N / (2.0 * L))) N *= 2;
  if (std::pow(static_cast<double>(N), n) > std::ldexp(1.0, 26))
    throw ResourceError("automatic grid N = " + std::to_string(N) + " exceeds the grid budget");
  return GridSpec{n, N, L};
}

}  // namespace detail

}  // namespace fwlab
