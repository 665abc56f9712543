#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "fwlab/fourier.hpp"
#include "fwlab/measures.hpp"
#include "fwlab/norms.hpp"

namespace fwlab {

using Json = nlohmann::ordered_json;

/// {"n", "is_even", "atoms": [[x1..xn, w], ...], "diameter_hint"}.
Json measure_to_json(const AtomicMeasure& mu);
/// Throws ParameterError on missing keys, non-numeric or non-finite entries,
/// ragged rows and negative weights.
AtomicMeasure measure_from_json(const Json& doc);
AtomicMeasure read_measure(const std::string& path);
void write_measure(const AtomicMeasure& mu, const std::string& path);

/// Snapshot file: one JSON header line {"n","N","L","domain","tag"} followed by
/// N^n (re, im) pairs of little-endian doubles in storage order.
void write_snapshot(const GridField& f, const std::string& tag, const std::string& path);
std::pair<GridField, std::string> read_snapshot(const std::string& path);

/// A pass/fail check on one reported number.
struct Gate {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // "<=", ">=" or "<"
  bool passed = false;
};

Gate make_gate(std::string name, double value, std::string relation, double bound);

struct ResultRecord {
  std::string experiment;
  std::string anchor;  // the statement this experiment exercises
  Json params = Json::object();
  std::vector<Json> samples;  // flat objects, one per scale
  Json fit = nullptr;
  std::vector<Gate> gates;
  Json extra = Json::object();

  bool pass() const;
  void add_fit(const ExponentFit& f);
  Json to_json() const;
  /// One row per sample, columns in order of first appearance.
  std::string samples_csv() const;
};

}  // namespace fwlab
