// Acceptance run: one line per criterion, nonzero exit if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fwlab/fourier.hpp"
#include "fwlab/io.hpp"
#include "fwlab/measures.hpp"
#include "fwlab/wave.hpp"

using namespace fwlab;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

fs::path scratch_root() {
  const fs::path root = fs::temp_directory_path() / "fwlab_acceptance";
  fs::create_directories(root);
  return root;
}

struct Run {
  int exit_code = -1;
  Json result;
  std::string bytes;
  double seconds = 0.0;
  std::string log;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Every criterion-level run goes through the command-line entry point.
std::vector<std::pair<std::string, std::vector<std::string>>> g_runs;

Run run_cli(const std::string& tag, std::vector<std::string> args) {
  const fs::path dir = scratch_root() / tag;
  fs::remove_all(dir);
  g_runs.emplace_back(tag, args);
  std::vector<std::string> argv{"fwlab", "run"};
  argv.insert(argv.end(), args.begin(), args.end());
  argv.push_back("--out");
  argv.push_back(dir.string());
  std::ostringstream out, err;
  Run r;
  const auto t0 = Clock::now();
  r.exit_code = cli_main(argv, out, err);
  r.seconds = seconds_since(t0);
  r.log = out.str() + err.str();
  if (fs::exists(dir / "result.json")) {
    r.bytes = slurp(dir / "result.json");
    r.result = Json::parse(r.bytes);
  }
  return r;
}

double gate(const Run& r, const std::string& name) {
  for (const auto& g : r.result["gates"])
    if (g["name"] == name) return g["value"].get<double>();
  return NAN;
}

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("AC%-2d %s  %s | %s\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

void spectral_core() {
  const auto t0 = Clock::now();
  const GridSpec g{2, 512, 2.0};
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  GridField f(g, FieldDomain::space);
  for (auto& v : f.values()) v = {nd(rng), nd(rng)};

  const GridField back = to_space(to_frequency(f));
  double rt = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) rt = std::max(rt, std::abs(back[i] - f[i]));
  rt /= sup_norm(f);

  const double s = 0.37, t = 0.51;
  const GridField ws = half_wave(f, s);
  const double unit = std::abs(l2_norm(ws) / l2_norm(f) - 1.0);
  const GridField wst = half_wave(ws, t), direct = half_wave(f, s + t);
  double group = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) group = std::max(group, std::abs(wst[i] - direct[i]));
  group /= sup_norm(direct);

  const AtomicMeasure mu = translate(build_cantor_product(cantor_ratio_for_dimension(1.0, 2), 5, 2),
                                     std::vector<double>{-0.5, -0.5});
  const int k_max = 6;
  const auto pieces = lp_decompose(mu, k_max, g);
  GridField sum(g, FieldDomain::space);
  for (const auto& p : pieces)
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += p.field[i];
  const GridField low = lowpass_field(mu, k_max, g);
  double lp = 0.0;
  for (std::size_t i = 0; i < sum.size(); ++i) lp = std::max(lp, std::abs(sum[i] - low[i]));
  lp /= sup_norm(low);
  const double secs = seconds_since(t0);

  const bool ok = rt < 1e-12 && unit < 1e-12 && group < 1e-12 && lp < 1e-10 && secs < 10.0;
  report(1, ok, "spectral core on 512^2",
         fmt("round-trip %.2e, unitarity %.2e, group law %.2e, LP reconstruction %.2e, %.1f s", rt, unit, group, lp,
             secs));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  spectral_core();

  {
    const Run r = run_cli("ac2", {"nullform-suite", "--seed", "2"});
    const double id = gate(r, "identity"), mean = gate(r, "mean");
    report(2, r.exit_code == 0 && id < 1e-6 && mean < 1e-10, "null-form identity, 20 random band-limited data",
           fmt("max relative residual %.2e, max |mean| %.2e", id, mean));
  }
  {
    const Run c = run_cli("ac3a", {"frostman-audit"});
    const Run u = run_cli("ac3b", {"frostman-audit", "--measure", R"({"kind":"uniform","n":2,"m":256})", "--floors",
                                   "0.03125", "--tolerances", R"({"constant_max":4})"});
    const double cmax = u.result["samples"][0]["constant"].get<double>();
    report(3, c.exit_code == 0 && u.exit_code == 0 && cmax <= 4.0, "Frostman audits",
           fmt("Cantor(1/3,8) stability factor %.3f over floors 2^-6..2^-9, uniform square constant %.3f",
               gate(c, "stability_factor"), cmax));
  }
  {
    struct Member {
      double alpha;
      int depth;
    };
    bool ok = true;
    std::string detail;
    for (const Member m : {Member{0.4, 3}, Member{0.63, 4}, Member{1.0, 5}, Member{1.26, 6}}) {
      const std::string spec = fmt(R"({"kind":"cantor","n":2,"alpha":%g,"depth":%d,"center":true})", m.alpha, m.depth);
      const Run r = run_cli(fmt("ac4_%g", m.alpha), {"lp-bounds", "--measure", spec});
      const double slope = r.result["fit"]["slope"].get<double>();
      ok = ok && std::abs(slope - (2.0 - m.alpha)) <= 0.15;
      detail += fmt("%salpha %.2f: slope %.3f vs %.2f", detail.empty() ? "" : "; ", m.alpha, slope, 2.0 - m.alpha);
    }
    report(4, ok, "dyadic sup-norm slope, n=2 Cantor family, k=3..8", detail);
  }
  {
    const Run r = run_cli("ac5", {"beta-fit"});
    const double beta = r.result["extra"]["beta"].get<double>(), res = gate(r, "residual");
    report(5, std::abs(beta - 1.0) <= 0.1 && res < 0.05 && r.seconds < 60.0, "circle decay exponent beta",
           fmt("beta %.4f, residual %.4f, %.1f s", beta, res, r.seconds));
  }
  {
    const Run r = run_cli("ac6", {"fixed-time-fit"});
    const double slope = r.result["fit"]["slope"].get<double>();
    report(6, std::abs(slope - 0.5) <= 0.15, "trace-lemma scaling, circle, R=2^3..2^9",
           fmt("slope %.4f, %.1f s", slope, r.seconds));
  }
  {
    const Run r = run_cli("ac7", {"gamma-fit"});
    const double g = gate(r, "gamma_min"), res = gate(r, "residual");
    report(7, g >= 0.35 && res < 0.1, "gamma recovery, Cantor alpha=1/2, p=2",
           fmt("gamma %.4f, residual %.4f, %.1f s", g, res, r.seconds));
  }
  {
    const Run r = run_cli("ac8", {"maximal-embed"});
    std::string detail;
    for (const auto& f : r.result["extra"]["fits"])
      detail += fmt("%salpha %.2f: maximal %.3f, Strichartz %.3f", detail.empty() ? "" : "; ", f["alpha"].get<double>(),
                    f["maximal_slope"].get<double>(), f["strichartz_slope"].get<double>());
    report(8, r.exit_code == 0, "maximal <= Strichartz + 1/p + 0.15 on every test measure", detail);
  }
  {
    const Run a = run_cli("ac9a", {"exponent-atlas", "--n", "2", "--p", "2", "--alpha-grid", "0:2:0.01"});
    const Run b = run_cli("ac9b", {"exponent-atlas", "--n", "3", "--p", "1.5", "--alpha-grid", "0:3:0.01"});
    report(9, a.exit_code == 0 && b.exit_code == 0, "exponent atlas exactness",
           fmt("seam %.1e, cutoff %.1e, table seam %.1e, pass-through %.1e", std::max(gate(a, "seam"), gate(b, "seam")),
               std::max(gate(a, "cutoff"), gate(b, "cutoff")), std::max(gate(a, "table_seam"), gate(b, "table_seam")),
               std::max(gate(a, "pass_through"), gate(b, "pass_through"))));
  }
  {
    const Run r = run_cli("ac10", {"falconer-lattice-sweep", "--q", "8,16,32,64", "--alpha", "1", "--n", "2"});
    std::string detail;
    for (const auto& s : r.result["samples"])
      detail += fmt("q=%d: %.4f ", s["q"].get<int>(), s["distance_set_measure"].get<double>());
    report(10, r.exit_code == 0 && r.seconds < 120.0, "lattice distance sets shrink", detail + fmt("(%.1f s)", r.seconds));
  }
  {
    const Run r = run_cli("ac11", {"weak-type-chain"});
    std::string detail = fmt("cap violations %g, layer-cake error %.2e, constant spread %.3f", gate(r, "cap_violations"),
                             gate(r, "layer_cake"), gate(r, "constant_stability"));
    const Run c = run_cli("ac11_cantor", {"weak-type-chain", "--measure",
                                          R"({"kind":"cantor","n":2,"alpha":0.5,"depth":3,"center":true})"});
    detail += fmt(" (Cantor 1/2 spread %.3f, not gated)", gate(c, "constant_stability"));
    report(11, r.exit_code == 0, "weak-type chain, circle x delta_0, R=16,32,64", detail);
  }
  {
    // Rerun every experiment above and compare result.json bytes.
    const auto runs = g_runs;
    int differ = 0;
    std::string which;
    for (const auto& [tag, args] : runs) {
      const std::string first = slurp(scratch_root() / tag / "result.json");
      std::vector<std::string> again = args;
      again.push_back("--threads");
      again.push_back("2");
      const Run r = run_cli(tag + "_rerun", again);
      if (first.empty() || r.bytes != first) {
        ++differ;
        which += " " + tag;
      }
    }
    report(12, differ == 0, "byte-identical result.json on rerun",
           fmt("%zu runs repeated (threads 1 then 2), %d differ%s", runs.size(), differ, which.c_str()));
  }
  std::printf("total %.1f s, %d criteria failed\n", seconds_since(start), failures);
  return failures == 0 ? 0 : 1;
}
