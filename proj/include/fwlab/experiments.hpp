#pragma once

#include <string>
#include <vector>

#include "fwlab/io.hpp"

namespace fwlab {

inline constexpr int kConfigSchemaVersion = 1;

/// Names accepted by run_experiment, in a fixed order.
const std::vector<std::string>& experiment_names();

/// Versioned description of every config key, per experiment.
Json config_schema();

/// Diagnostics for a config document; empty when it is valid.
std::vector<std::string> validate_config(const Json& config);

/// Ready-to-run config for an experiment (the desk-scale defaults).
Json default_config(const std::string& experiment);

/// Runs a validated config. Throws ParameterError for invalid documents and
/// ResourceError when a budget would be exceeded. Snapshots, when requested,
/// are written under <snapshot_dir>/.
ResultRecord run_experiment(const Json& config, const std::string& snapshot_dir = "");

}  // namespace fwlab
