#include "fwlab/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fwlab/error.hpp"

namespace fwlab {

namespace {
double finite_number(const Json& v, const char* what) {
  if (!v.is_number()) throw ParameterError(std::string(what) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParameterError(std::string(what) + " must be finite");
  return x;
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}
}  // namespace

Json measure_to_json(const AtomicMeasure& mu) {
  Json atoms = Json::array();
  for (std::size_t j = 0; j < mu.size(); ++j) {
    Json row = Json::array();
    for (double x : mu.point(j)) row.push_back(x);
    row.push_back(mu.weight(j));
    atoms.push_back(std::move(row));
  }
  return Json{{"n", mu.dimension()}, {"is_even", mu.is_even()}, {"atoms", std::move(atoms)}, {"diameter_hint", mu.diameter_hint()}};
}

AtomicMeasure measure_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParameterError("measure document must be a JSON object");
  for (const char* key : {"n", "atoms"})
    if (!doc.contains(key)) throw ParameterError(std::string("measure document lacks \"") + key + "\"");
  if (!doc["n"].is_number_integer() || doc["n"].get<int>() < 1) throw ParameterError("\"n\" must be a positive integer");
  const int n = doc["n"].get<int>();
  const bool even = doc.value("is_even", false);
  double hint = -1.0;
  if (doc.contains("diameter_hint")) hint = finite_number(doc["diameter_hint"], "diameter_hint");
  if (!doc["atoms"].is_array()) throw ParameterError("\"atoms\" must be an array");
  std::vector<double> pts, w;
  for (const auto& row : doc["atoms"]) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n) + 1)
      throw ParameterError("each atom row needs n coordinates and a weight");
    for (int a = 0; a < n; ++a) pts.push_back(finite_number(row[a], "atom coordinate"));
    const double wt = finite_number(row[n], "atom weight");
    if (wt < 0.0) throw ParameterError("atom weights must be nonnegative");
    w.push_back(wt);
  }
  return AtomicMeasure(n, std::move(pts), std::move(w), even, hint);
}

AtomicMeasure read_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open measure file " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParameterError("measure file " + path + ": " + e.what());
  }
  return measure_from_json(doc);
}

void write_measure(const AtomicMeasure& mu, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write " + path);
  out << measure_to_json(mu).dump() << '\n';
}

void write_snapshot(const GridField& f, const std::string& tag, const std::string& path) {
  static_assert(std::endian::native == std::endian::little, "snapshot writer assumes little-endian doubles");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path);
  const GridSpec& g = f.grid();
  const Json header{{"n", g.n},
                    {"N", g.N},
                    {"L", g.L},
                    {"domain", f.domain() == FieldDomain::space ? "space" : "frequency"},
                    {"tag", tag}};
  out << header.dump() << '\n';
  out.write(reinterpret_cast<const char*>(f.values().data()), static_cast<std::streamsize>(f.size() * sizeof(cplx)));
}

std::pair<GridField, std::string> read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open snapshot " + path);
  std::string line;
  std::getline(in, line);
  Json h;
  try {
    h = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParameterError("snapshot header: " + std::string(e.what()));
  }
  const GridSpec g{h.at("n").get<int>(), h.at("N").get<int>(), h.at("L").get<double>()};
  const FieldDomain d = h.at("domain").get<std::string>() == "space" ? FieldDomain::space : FieldDomain::frequency;
  std::vector<cplx> v(g.total());
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
  if (in.gcount() != static_cast<std::streamsize>(v.size() * sizeof(cplx))) throw ParameterError("snapshot truncated");
  return {GridField(g, d, std::move(v)), h.at("tag").get<std::string>()};
}

Gate make_gate(std::string name, double value, std::string relation, double bound) {
  Gate g{std::move(name), value, bound, std::move(relation), false};
  if (g.relation == "<=")
    g.passed = value <= bound;
  else if (g.relation == ">=")
    g.passed = value >= bound;
  else if (g.relation == "<")
    g.passed = value < bound;
  else
    throw ParameterError("unknown gate relation " + g.relation);
  return g;
}

bool ResultRecord::pass() const {
  for (const auto& g : gates)
    if (!g.passed) return false;
  return true;
}

void ResultRecord::add_fit(const ExponentFit& f) {
  fit = Json{{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual_rms},
             {"scale_min", f.scale_min}, {"scale_max", f.scale_max}};
}

Json ResultRecord::to_json() const {
  Json gj = Json::array(), tol = Json::object();
  for (const auto& g : gates) {
    gj.push_back({{"name", g.name}, {"value", g.value}, {"relation", g.relation}, {"bound", g.bound}, {"passed", g.passed}});
    tol[g.name] = g.bound;
  }
  Json doc{{"experiment", experiment}, {"anchor", anchor}, {"params", params}, {"samples", samples}, {"fit", fit}};
  doc["tolerances"] = std::move(tol);
  doc["gates"] = std::move(gj);
  if (!extra.empty()) doc["extra"] = extra;
  doc["pass"] = pass();
  return doc;
}

std::string ResultRecord::samples_csv() const {
  std::vector<std::string> cols;
  for (const auto& s : samples)
    for (const auto& [k, v] : s.items())
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  std::ostringstream os;
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  for (const auto& s : samples) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) os << ',';
      if (!s.contains(cols[c])) continue;
      const Json& v = s[cols[c]];
      if (v.is_number_float())
        os << format_number(v.get<double>());
      else if (v.is_string())
        os << v.get<std::string>();
      else
        os << v.dump();
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace fwlab
