#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fwlab/error.hpp"
#include "fwlab/experiments.hpp"
#include "fwlab/io.hpp"

namespace fwlab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double to_number(const std::string& s, const std::string& flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ParameterError("--" + flag + ": \"" + s + "\" is not a number");
  return v;
}

long long to_integer(const std::string& s, const std::string& flag) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ParameterError("--" + flag + ": \"" + s + "\" is not an integer");
  return v;
}

// Converts a flag value using the type the schema gives the key.
Json convert(const std::string& type, const std::string& value, const std::string& flag) {
  if (type == "integer") return to_integer(value, flag);
  if (type == "number") return to_number(value, flag);
  if (type == "boolean") {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ParameterError("--" + flag + ": expected true or false");
  }
  if (type == "string") return value;
  if (type == "integer list") {
    Json a = Json::array();
    for (const auto& s : split(value, ',')) a.push_back(to_integer(s, flag));
    return a;
  }
  if (type == "number list") {
    Json a = Json::array();
    for (const auto& s : split(value, ',')) a.push_back(to_number(s, flag));
    return a;
  }
  if (type.rfind("range", 0) == 0) {
    const auto parts = split(value, ':');
    if (parts.size() != 3) throw ParameterError("--" + flag + ": expected lo:hi:step");
    return Json::array({to_number(parts[0], flag), to_number(parts[1], flag), to_number(parts[2], flag)});
  }
  try {
    return Json::parse(value);
  } catch (const Json::parse_error&) {
    throw ParameterError("--" + flag + ": expected inline JSON");
  }
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParameterError(path + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParameterError("cannot write " + path.string());
  os << text;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fwlab: fractal wave estimate experiments"};
  app.allow_extras();
  app.set_help_flag("-h,--help", "print usage");
  std::string experiment, config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("experiment", experiment, "experiment name");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized data");
  app.add_option("--threads", threads, "worker threads");

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help() << "experiments:";
    for (const auto& n : experiment_names()) out << ' ' << n;
    out << '\n';
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "fwlab: " << e.what() << '\n';
    return kExitConfigError;
  }

  Json config = config_path.empty() ? Json::object() : load_json(config_path);
  if (!experiment.empty()) {
    if (config.contains("experiment") && config["experiment"] != experiment)
      throw ParameterError("config names experiment " + config["experiment"].dump() + " but " + experiment +
                           " was requested");
    if (config_path.empty()) config = default_config(experiment);
    config["experiment"] = experiment;
  }
  if (!config.contains("experiment")) throw ParameterError("no experiment given");
  const std::string name = config["experiment"].get<std::string>();

  const Json schema = config_schema();
  const Json* keys = schema["experiments"].contains(name) ? &schema["experiments"][name]["keys"] : nullptr;
  const auto extras = app.remaining();
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& a = extras[i];
    if (a.rfind("--", 0) != 0) throw ParameterError("unexpected argument \"" + a + "\"");
    std::string flag = a.substr(2), value;
    const auto eq = flag.find('=');
    if (eq != std::string::npos) {
      value = flag.substr(eq + 1);
      flag = flag.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) throw ParameterError("--" + flag + " needs a value");
      value = extras[++i];
    }
    std::string key = flag;
    std::replace(key.begin(), key.end(), '-', '_');
    std::string type = "object";
    if (keys && keys->contains(key))
      type = (*keys)[key]["type"].get<std::string>();
    else if (schema["common"].contains(key))
      type = schema["common"][key]["type"].get<std::string>();
    else
      throw ParameterError("unknown flag --" + flag + " for " + name);
    config[key] = convert(type, value, flag);
  }
  if (app.count("--seed")) config["seed"] = seed;
  if (app.count("--threads")) config["threads"] = threads;

  std::filesystem::path dir;
  if (!out_dir.empty())
    dir = out_dir;
  else if (const char* env = std::getenv("FWLAB_OUT"))
    dir = env;
  else if (config.contains("out") && config["out"].is_string())
    dir = config["out"].get<std::string>();
  else
    dir = std::filesystem::path("fwlab-out") / name;

  const auto diag = validate_config(config);
  if (!diag.empty()) {
    err << "fwlab: invalid config\n";
    for (const auto& d : diag) err << "  " << d << '\n';
    return kExitConfigError;
  }
  std::filesystem::create_directories(dir);
  const ResultRecord rec = run_experiment(config, (dir / "fields").string());
  write_text(dir / "result.json", rec.to_json().dump(2) + "\n");
  write_text(dir / "samples.csv", rec.samples_csv());
  for (const auto& g : rec.gates)
    out << (g.passed ? "PASS " : "FAIL ") << g.name << ' ' << g.value << ' ' << g.relation << ' ' << g.bound << '\n';
  out << name << ": " << (rec.pass() ? "pass" : "gate failure") << " (" << dir.string() << ")\n";
  return rec.pass() ? kExitPass : kExitGateFail;
}

}  // namespace

int cli_main(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args = argv;
  if (args.size() > 1 && args[1] == "run") args.erase(args.begin() + 1);
  const std::string cmd = args.size() > 1 ? args[1] : "";
  try {
    if (cmd == "list") {
      for (const auto& n : experiment_names()) out << n << '\n';
      return kExitPass;
    }
    if (cmd == "schema") {
      out << config_schema().dump(2) << '\n';
      return kExitPass;
    }
    if (cmd == "validate") {
      std::string path;
      CLI::App app{"validate a config"};
      app.add_option("--config", path, "JSON config file")->required();
      try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend() - 2));
      } catch (const CLI::ParseError& e) {
        err << "fwlab: " << e.what() << '\n';
        return kExitConfigError;
      }
      const auto diag = validate_config(load_json(path));
      for (const auto& d : diag) out << d << '\n';
      if (diag.empty()) out << "ok\n";
      return diag.empty() ? kExitPass : kExitConfigError;
    }
    return run(args, out, err);
  } catch (const ResourceError& e) {
    err << "fwlab: resource budget exceeded: " << e.what() << '\n';
    return kExitResourceError;
  } catch (const ParameterError& e) {
    err << "fwlab: " << e.what() << '\n';
  } catch (const RangeError& e) {
    err << "fwlab: " << e.what() << '\n';
  } catch (const DomainError& e) {
    err << "fwlab: " << e.what() << '\n';
  } catch (const Json::exception& e) {
    err << "fwlab: " << e.what() << '\n';
  }
  return kExitConfigError;
}

}  // namespace fwlab
