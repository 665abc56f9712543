#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "fwlab/conditions.hpp"
#include "fwlab/error.hpp"
#include "fwlab/experiments.hpp"
#include "fwlab/io.hpp"

using namespace fwlab;
namespace fs = std::filesystem;

namespace {

bool mentions(const std::vector<std::string>& diag, const std::string& text) {
  for (const auto& d : diag)
    if (d.find(text) != std::string::npos) return true;
  return false;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "fwlab_unit" / name;
  fs::remove_all(p);
  return p;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "fwlab");
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config validation diagnostics") {
  CHECK(validate_config(Json{{"experiment", "exponent-atlas"}}).empty());
  for (const auto& name : experiment_names()) {
    INFO(name);
    CHECK(validate_config(default_config(name)).empty());
  }

  Json c = default_config("gamma-fit");
  c["k_maxx"] = 4;
  CHECK(mentions(validate_config(c), "unknown key \"k_maxx\""));

  CHECK(mentions(validate_config(Json{{"experiment", "beta-fit"}}), "missing measure spec"));
  CHECK(mentions(validate_config(Json{{"experiment", "maximal-embed"}}), "missing measure list"));
  CHECK(mentions(validate_config(Json{{"experiment", "nope"}}), "unknown experiment"));
  CHECK(mentions(validate_config(Json::array()), "JSON object"));

  c = default_config("lp-bounds");
  c["k_min"] = "three";
  c["measure"]["shape"] = 1;
  c["tolerances"] = {{"slope_error", 0.2}, {"gamma_min", 0.3}};
  const auto d = validate_config(c);
  CHECK(mentions(d, "\"k_min\": expected integer"));
  CHECK(mentions(d, "measure: unknown key \"shape\""));
  CHECK(mentions(d, "unknown tolerance \"gamma_min\""));
  CHECK_FALSE(mentions(d, "slope_error"));

  c = default_config("frostman-audit");
  c["measure"] = {{"kind", "blob"}};
  CHECK(mentions(validate_config(c), "unknown kind \"blob\""));
  c["measure"] = {{"kind", "file"}};
  CHECK(mentions(validate_config(c), "needs \"path\""));
  c = default_config("nullform-suite");
  c["grid"] = {{"N", 64}};
  CHECK(mentions(validate_config(c), "grid.L"));
  c["threads"] = 0;
  CHECK(mentions(validate_config(c), "threads"));

  CHECK_THROWS_AS(run_experiment(Json{{"experiment", "beta-fit"}}), ParameterError);
  CHECK_THROWS_AS(default_config("nope"), ParameterError);
}

TEST_CASE("schema is versioned and complete") {
  const Json s = config_schema();
  CHECK(s["version"] == kConfigSchemaVersion);
  CHECK(s["experiments"].size() == experiment_names().size());
  for (const auto& name : experiment_names()) {
    CHECK(s["experiments"].contains(name));
    CHECK_FALSE(s["experiments"][name]["anchor"].get<std::string>().empty());
  }
  CHECK(s["measure"].contains("kind"));
  CHECK(s["common"].contains("seed"));
}

TEST_CASE("records are deterministic in the seed") {
  Json c = default_config("nullform-suite");
  c["trials"] = 2;
  c["leibniz_trials"] = 2;
  c["grid"] = {{"N", 64}, {"L", 4.0}};
  c["band"] = 3.0;
  const std::string a = run_experiment(c).to_json().dump();
  CHECK(run_experiment(c).to_json().dump() == a);
  c["seed"] = 9;
  CHECK(run_experiment(c).to_json().dump() != a);

  Json f = default_config("falconer-lattice-sweep");
  f["q"] = {4, 8, 16};
  const std::string one = run_experiment(f).to_json().dump();
  f["threads"] = 3;
  CHECK(run_experiment(f).to_json().dump() == one);
}

TEST_CASE("experiment records") {
  const ResultRecord atlas = run_experiment(default_config("exponent-atlas"));
  CHECK(atlas.pass());
  CHECK(atlas.samples.size() == 300);
  CHECK(atlas.samples.front()["alpha"].get<double>() == doctest::Approx(0.01));
  CHECK(atlas.samples.back()["gamma_lower_bound"].is_null());

  Json f = default_config("falconer-lattice-sweep");
  f["q"] = {16, 8};
  const ResultRecord up = run_experiment(f);
  CHECK_FALSE(up.pass());
  CHECK(up.gates[0].value > 1.0);

  Json d = default_config("distance-density");
  const ResultRecord dd = run_experiment(d);
  CHECK(dd.samples.size() == 64);
  CHECK(dd.params["lambda"].get<double>() == 4.0);
  CHECK(dd.extra["total"].get<double>() > 0.0);
}

TEST_CASE("command line") {
  std::string out, err;
  CHECK(cli({"list"}, &out) == kExitPass);
  CHECK(out.find("weak-type-chain") != std::string::npos);
  CHECK(cli({"schema"}, &out) == kExitPass);
  CHECK(Json::parse(out)["version"] == kConfigSchemaVersion);

  const fs::path dir = temp_dir("atlas");
  CHECK(cli({"run", "exponent-atlas", "--n", "2", "--p", "2", "--alpha-grid", "0:2:0.01", "--out", dir.string()}, &out) ==
        kExitPass);
  const Json r = Json::parse(slurp(dir / "result.json"));
  CHECK(r["experiment"] == "exponent-atlas");
  CHECK(r["params"]["alpha_grid"][1].get<double>() == 2.0);
  CHECK(r["pass"] == true);
  CHECK(slurp(dir / "samples.csv").rfind("alpha,s_necessary,", 0) == 0);

  const fs::path fdir = temp_dir("falconer");
  CHECK(cli({"falconer-lattice-sweep", "--q=16,8", "--out", fdir.string()}, &out) == kExitGateFail);
  CHECK(out.find("FAIL decrease_ratio") != std::string::npos);

  CHECK(cli({"run", "gamma-fit", "--k-maxx", "3"}, nullptr, &err) == kExitConfigError);
  CHECK(err.find("--k-maxx") != std::string::npos);
  CHECK(cli({"run", "gamma-fit", "--k-max", "three"}, nullptr, &err) == kExitConfigError);
  CHECK(cli({"run", "nope"}, nullptr, &err) == kExitConfigError);
  CHECK(cli({"run", "beta-fit", "--measure", "{bad json"}, nullptr, &err) == kExitConfigError);
  CHECK(cli({"run", "exponent-atlas", "--n", "1", "--out", temp_dir("n1").string()}, nullptr, &err) == kExitConfigError);
  CHECK(cli({"run", "gamma-fit", "--k-max", "14", "--out", temp_dir("big").string(), "--measure",
             R"({"kind":"cantor","n":2,"alpha":1,"depth":2})"},
            nullptr, &err) == kExitResourceError);

  const fs::path cfg = temp_dir("cfg") / "c.json";
  fs::create_directories(cfg.parent_path());
  std::ofstream(cfg) << R"({"experiment": "frostman-audit", "colour": 1})";
  CHECK(cli({"validate", "--config", cfg.string()}, &out) == kExitConfigError);
  CHECK(out.find("unknown key \"colour\"") != std::string::npos);
  std::ofstream(cfg) << R"({"experiment": "exponent-atlas", "n": 3})";
  CHECK(cli({"validate", "--config", cfg.string()}, &out) == kExitPass);
  CHECK(cli({"run", "frostman-audit", "--config", cfg.string()}, nullptr, &err) == kExitConfigError);
  CHECK(err.find("names experiment") != std::string::npos);
}

TEST_CASE("output directory override and snapshots") {
  const fs::path env_dir = temp_dir("env");
  ::setenv("FWLAB_OUT", env_dir.string().c_str(), 1);
  CHECK(cli({"run", "exponent-atlas", "--alpha-grid", "0.5:1:0.5"}) == kExitPass);
  ::unsetenv("FWLAB_OUT");
  CHECK(fs::exists(env_dir / "result.json"));

  const fs::path dir = temp_dir("snap");
  CHECK(cli({"run", "lp-bounds", "--grid", R"({"N":256,"L":2.0})", "--k-min", "3", "--k-max", "5", "--snapshots", "true",
             "--measure", R"({"kind":"cantor","n":2,"alpha":1,"depth":3,"center":true})", "--tolerances",
             R"({"slope_error":10})", "--out", dir.string()}) <= kExitGateFail);
  const auto [field, tag] = read_snapshot((dir / "fields" / "mu_4.bin").string());
  CHECK(tag == "mu_4");
  CHECK(field.grid().N == 256);
  CHECK(sup_norm(field) > 0.0);
}

TEST_CASE("atlas over an (alpha, p) grid") {
  Json c = default_config("exponent-atlas");
  c["alpha_grid"] = {0.5, 2.0, 0.5};
  c["p_grid"] = {1.0, 3.0, 1.0};
  const ResultRecord r = run_experiment(c);
  REQUIRE(r.samples.size() == 12);
  CHECK(r.samples[4]["p"].get<double>() == 2.0);
  CHECK(r.samples[8]["new_necessary"].is_null());
  CHECK(r.samples[0]["s_necessary"].get<double>() == doctest::Approx(s_necessary(0.5, 1.0, 2)));
}
