// Configuration-driven front end: generates patterns, runs spectrum /
// Chern-map / winding / residue experiments, and emits deterministic CSV
// tables plus a JSON manifest and gnuplot scripts.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "apc/hamiltonian.hpp"
#include "apc/invariants.hpp"
#include "apc/io.hpp"
#include "apc/pattern.hpp"
#include "apc/spectral.hpp"

extern "C" void openblas_set_num_threads(int);

namespace {

using json = nlohmann::json;

struct RunConfig {
  std::string experiment;
  double L = 20.0;
  int d = 2;
  double d_min = 0.83;
  double d_max = 0.0;  // 0 = unset
  std::uint64_t seed = 1;
  double beta = 3.0;
  double range = 0.0;  // 0 = no cutoff
  double delta = 0.5;
  int flux_min = 0;
  int flux_max = 0;
  double ef_min = 0.1;
  double ef_max = 0.1;
  int ef_steps = 1;
  double kappa = 0.1;
  double tol = 1e-8;
  std::string pattern_path;
  std::string out = "out";
  int threads = 1;
};

const std::set<std::string> kExperiments = {
    "generate", "spectrum", "chern", "map", "winding", "verify", "residue"};

/// Key-value-with-sections config file; section headers are organizational
/// only (keys are globally unique).
std::map<std::string, std::string> parse_config_file(
    const std::string& path, std::vector<std::string>* unknown) {
  std::ifstream is(path);
  if (!is) throw apc::ConfigInvalid("cannot open config file " + path);
  static const std::set<std::string> known = {
      "experiment", "L",        "d",      "d_min",   "d_max",  "seed",
      "beta",       "range",    "delta",  "flux_min", "flux_max",
      "ef_min",     "ef_max",   "ef_steps", "kappa", "tol",
      "pattern",    "out",      "threads"};
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  bool any = false;
  while (std::getline(is, line)) {
    ++lineno;
    const auto h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    any = true;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw apc::ConfigInvalid("malformed section at line " +
                                 std::to_string(lineno));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw apc::ConfigInvalid("expected key=value at line " +
                               std::to_string(lineno));
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      const auto b2 = s.find_first_not_of(" \t");
      const auto e2 = s.find_last_not_of(" \t");
      s = b2 == std::string::npos ? "" : s.substr(b2, e2 - b2 + 1);
    };
    trim(key);
    trim(val);
    if (!known.count(key)) {
      if (unknown) unknown->push_back(key);
      continue;
    }
    kv[key] = val;
  }
  if (!any) throw apc::ConfigInvalid("config file is empty: " + path);
  return kv;
}

void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  const auto get = [&](const char* k) -> const std::string* {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  try {
    if (auto* v = get("experiment")) cfg.experiment = *v;
    if (auto* v = get("L")) cfg.L = std::stod(*v);
    if (auto* v = get("d")) cfg.d = std::stoi(*v);
    if (auto* v = get("d_min")) cfg.d_min = std::stod(*v);
    if (auto* v = get("d_max")) cfg.d_max = std::stod(*v);
    if (auto* v = get("seed")) cfg.seed = std::stoull(*v);
    if (auto* v = get("beta")) cfg.beta = std::stod(*v);
    if (auto* v = get("range")) cfg.range = std::stod(*v);
    if (auto* v = get("delta")) cfg.delta = std::stod(*v);
    if (auto* v = get("flux_min")) cfg.flux_min = std::stoi(*v);
    if (auto* v = get("flux_max")) cfg.flux_max = std::stoi(*v);
    if (auto* v = get("ef_min")) cfg.ef_min = std::stod(*v);
    if (auto* v = get("ef_max")) cfg.ef_max = std::stod(*v);
    if (auto* v = get("ef_steps")) cfg.ef_steps = std::stoi(*v);
    if (auto* v = get("kappa")) cfg.kappa = std::stod(*v);
    if (auto* v = get("tol")) cfg.tol = std::stod(*v);
    if (auto* v = get("pattern")) cfg.pattern_path = *v;
    if (auto* v = get("out")) cfg.out = *v;
    if (auto* v = get("threads")) cfg.threads = std::stoi(*v);
  } catch (const std::exception& e) {
    throw apc::ConfigInvalid(std::string("bad config value: ") + e.what());
  }
}

/// APC_<UPPERCASED KEY> environment overrides, applied between config file
/// and command-line flags.
void apply_env(RunConfig& cfg) {
  std::map<std::string, std::string> kv;
  for (const char* key :
       {"experiment", "L", "d", "d_min", "d_max", "seed", "beta", "range",
        "delta", "flux_min", "flux_max", "ef_min", "ef_max", "ef_steps",
        "kappa", "tol", "pattern", "out", "threads"}) {
    std::string env = "APC_";
    for (const char* p = key; *p; ++p)
      env += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
    if (const char* v = std::getenv(env.c_str())) kv[key] = v;
  }
  apply_kv(cfg, kv);
}

void check_config(const RunConfig& cfg) {
  if (!kExperiments.count(cfg.experiment))
    throw apc::ConfigInvalid("unknown experiment '" + cfg.experiment + "'");
  if (cfg.L < 4.0) throw apc::ConfigInvalid("L must be >= 4");
  if (cfg.d < 1 || cfg.d > 2) throw apc::ConfigInvalid("d must be 1 or 2");
  if (cfg.ef_steps < 1) throw apc::ConfigInvalid("ef_steps must be >= 1");
  if (cfg.flux_max < cfg.flux_min)
    throw apc::ConfigInvalid("flux_max must be >= flux_min");
  if (cfg.threads < 1) throw apc::ConfigInvalid("threads must be >= 1");
}

json config_json(const RunConfig& cfg) {
  return json{{"experiment", cfg.experiment},
              {"L", cfg.L},
              {"d", cfg.d},
              {"d_min", cfg.d_min},
              {"d_max", cfg.d_max},
              {"seed", cfg.seed},
              {"beta", cfg.beta},
              {"range", cfg.range},
              {"delta", cfg.delta},
              {"flux_min", cfg.flux_min},
              {"flux_max", cfg.flux_max},
              {"ef_min", cfg.ef_min},
              {"ef_max", cfg.ef_max},
              {"ef_steps", cfg.ef_steps},
              {"kappa", cfg.kappa},
              {"tol", cfg.tol},
              {"pattern", cfg.pattern_path},
              {"out", cfg.out},
              {"threads", cfg.threads}};
}

apc::DelonePattern load_or_generate(const RunConfig& cfg) {
  if (!cfg.pattern_path.empty()) return apc::read_pattern(cfg.pattern_path);
  return apc::generate_pattern(
      {cfg.d, cfg.L}, cfg.d_min,
      cfg.d_max > 0.0 ? std::optional<double>(cfg.d_max) : std::nullopt,
      cfg.seed);
}

apc::HoppingRule make_rule(const RunConfig& cfg) {
  apc::HoppingRule rule;
  rule.beta = cfg.beta;
  if (cfg.range > 0.0) rule.range = cfg.range;
  return rule;
}

std::vector<double> ef_grid(const RunConfig& cfg) {
  std::vector<double> grid;
  if (cfg.ef_steps == 1) {
    grid.push_back(cfg.ef_min);
  } else {
    const double step = (cfg.ef_max - cfg.ef_min) / (cfg.ef_steps - 1);
    for (int i = 0; i < cfg.ef_steps; ++i)
      grid.push_back(cfg.ef_min + step * i);
  }
  return grid;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream os(path);
  if (!os) throw apc::Error("cannot open " + path);
  os << body;
}

struct Manifest {
  json j;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  explicit Manifest(const RunConfig& cfg) {
    j["config"] = config_json(cfg);
    j["calibration"] = {{"chern_sign", apc::kChernSign},
                        {"winding_constant", apc::kWindingConstant},
                        {"localizer_even_sign", apc::kLocalizerEvenSign},
                        {"localizer_odd_sign", apc::kLocalizerOddSign},
                        {"hall_sign", apc::kHallSign}};
    j["versions"] = {
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                      std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"cxx_standard", static_cast<long>(__cplusplus)}};
    j["artifacts"] = json::array();
  }

  void artifact(const std::string& name) { j["artifacts"].push_back(name); }

  void finish(const std::string& dir) {
    j["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::ofstream os(dir + "/manifest.json");
    os << j.dump(2) << "\n";
  }
};

int run_generate(const RunConfig& cfg, Manifest& man) {
  const apc::DelonePattern pat = load_or_generate(cfg);
  apc::write_pattern(cfg.out + "/pattern.txt", pat);
  man.artifact("pattern.txt");
  const double r = cfg.d_min > 0 ? cfg.d_min / 2.0 : 1e-6;
  const double R = cfg.d_max > 0.0 ? cfg.d_max : 2.0;
  const apc::DeloneReport rep = apc::verify_delone(pat, r, R);
  man.j["delone"] = {{"N", pat.size()},
                     {"min_pair_distance", pat.min_pair_distance()},
                     {"uniformly_discrete", rep.uniform_discrete},
                     {"relatively_dense", rep.relatively_dense},
                     {"farthest_point_estimate", rep.farthest_point_estimate}};
  std::printf("generated N=%d pattern, min pair distance %.6f\n", pat.size(),
              pat.min_pair_distance());
  return 0;
}

int run_verify(const RunConfig& cfg, Manifest& man) {
  const apc::DelonePattern pat = load_or_generate(cfg);
  const double r = cfg.d_min > 0 ? cfg.d_min / 2.0 : 1e-6;
  const double R = cfg.d_max > 0.0 ? cfg.d_max : 2.0;
  const apc::DeloneReport rep = apc::verify_delone(pat, r, R);
  man.j["delone"] = {{"N", pat.size()},
                     {"r", r},
                     {"R", R},
                     {"uniformly_discrete", rep.uniform_discrete},
                     {"relatively_dense", rep.relatively_dense},
                     {"violating_pairs", rep.pair_witnesses.size()},
                     {"farthest_point_estimate", rep.farthest_point_estimate}};
  std::printf("Delone check: uniformly discrete %s, relatively dense %s, "
              "farthest point %.4f\n",
              rep.uniform_discrete ? "yes" : "no",
              rep.relatively_dense ? "yes" : "no",
              rep.farthest_point_estimate);
  return 0;
}

int run_spectrum(const RunConfig& cfg, Manifest& man) {
  auto pat = std::make_shared<apc::DelonePattern>(load_or_generate(cfg));
  const apc::HoppingRule rule = make_rule(cfg);
  std::vector<int> flux;
  for (int n = cfg.flux_min; n <= cfg.flux_max; ++n) flux.push_back(n);

  apc::CsvWriter spec_csv(cfg.out + "/butterfly.csv", "n,theta,k,E_k");
  apc::CsvWriter gap_csv(cfg.out + "/gaps.csv",
                         "n,theta,gap_low,gap_high,width");
  for (int n : flux) {
    const apc::FluxIndex fx{n};
    const double theta = fx.theta(pat->geometry.L);
    const apc::OperatorMatrix h = apc::build_hamiltonian(pat, rule, fx);
    const apc::SpectralData sd = apc::eigensolve(h, /*with_vectors=*/false);
    for (int k = 0; k < sd.size(); ++k)
      spec_csv.row({std::to_string(n), apc::format_double(theta),
                    std::to_string(k), apc::format_double(sd.eigenvalues[k])});
    for (const apc::GapEntry& g : apc::largest_gaps(sd.eigenvalues, 2))
      gap_csv.row({std::to_string(n), apc::format_double(theta),
                   apc::format_double(g.low), apc::format_double(g.high),
                   apc::format_double(g.width)});
  }
  man.artifact("butterfly.csv");
  man.artifact("gaps.csv");
  write_text(cfg.out + "/plot_butterfly.gnuplot",
             "set datafile separator ','\n"
             "set xlabel 'flux index n'\nset ylabel 'E'\n"
             "set terminal pngcairo size 900,700\n"
             "set output 'butterfly.png'\n"
             "plot 'butterfly.csv' every ::1 using 1:4 with dots notitle\n");
  man.artifact("plot_butterfly.gnuplot");
  return 0;
}

int run_chern(const RunConfig& cfg, Manifest& man) {
  auto pat = std::make_shared<apc::DelonePattern>(load_or_generate(cfg));
  const apc::FluxIndex fx{cfg.flux_min};
  const apc::OperatorMatrix h =
      apc::build_hamiltonian(pat, make_rule(cfg), fx);
  const apc::SpectralData sd = apc::eigensolve(h);
  const apc::FermiProjector proj = apc::fermi_projector(sd, cfg.ef_min);
  const apc::InvariantReport rep = apc::chern_number(proj);
  const apc::InvariantReport hall = apc::hall_conductance(proj);
  man.j["chern"] = {{"n", fx.n},
                    {"theta", fx.theta(pat->geometry.L)},
                    {"E_F", cfg.ef_min},
                    {"value", rep.value},
                    {"sigma_H", hall.value},
                    {"nearest_integer", rep.nearest_integer},
                    {"deviation", rep.deviation},
                    {"rank", proj.rank}};
  std::printf("chern(E_F=%g, n=%d) = %.10f (nearest %ld, dev %.2e), "
              "sigma_H = %.10f\n",
              cfg.ef_min, fx.n, rep.value, rep.nearest_integer, rep.deviation,
              hall.value);
  return 0;
}

int run_map(const RunConfig& cfg, Manifest& man) {
  auto pat = std::make_shared<apc::DelonePattern>(load_or_generate(cfg));
  std::vector<int> flux;
  for (int n = cfg.flux_min; n <= cfg.flux_max; ++n) flux.push_back(n);
  const std::vector<apc::HallMapCell> cells = apc::hall_conductance_map(
      pat, make_rule(cfg), flux, ef_grid(cfg), /*with_sobolev=*/true);
  apc::CsvWriter csv(
      cfg.out + "/map.csv",
      "n,theta,E_F,sigma_H,nearest_int,deviation,gap_width,sobolev_01_2");
  for (const apc::HallMapCell& c : cells)
    csv.row({std::to_string(c.n), apc::format_double(c.theta),
             apc::format_double(c.E_F), apc::format_double(c.sigma_H),
             std::to_string(c.nearest_int), apc::format_double(c.deviation),
             apc::format_double(c.gap_width),
             apc::format_double(c.sobolev_01_2)});
  man.artifact("map.csv");
  write_text(cfg.out + "/plot_map.gnuplot",
             "set datafile separator ','\n"
             "set xlabel 'flux index n'\nset ylabel 'E_F'\n"
             "set terminal pngcairo size 900,700\n"
             "set output 'map.png'\nset view map\n"
             "splot 'map.csv' every ::1 using 1:3:4 with points pt 5 ps 2 "
             "palette notitle\n");
  man.artifact("plot_map.gnuplot");
  return 0;
}

int run_winding(const RunConfig& cfg, Manifest& man) {
  auto pat = std::make_shared<apc::DelonePattern>(load_or_generate(cfg));
  apc::HoppingRule rule;  // flat bond profile, see build_chiral_chain
  rule.amplitude = [](double) { return 1.0; };
  apc::CsvWriter csv(cfg.out + "/winding.csv",
                     "delta,winding,nearest_int,deviation,localizer_odd");
  for (double delta : {cfg.delta, -cfg.delta}) {
    const apc::OperatorMatrix h = apc::build_chiral_chain(pat, rule, delta);
    const apc::InvariantReport rep = apc::winding_number(h);
    const int loc = apc::localizer_index_odd(h, cfg.kappa);
    csv.row({apc::format_double(delta), apc::format_double(rep.value),
             std::to_string(rep.nearest_integer),
             apc::format_double(rep.deviation), std::to_string(loc)});
    std::printf("delta=%+g winding=%.8f localizer=%d\n", delta, rep.value,
                loc);
  }
  man.artifact("winding.csv");
  return 0;
}

int run_residue(const RunConfig& cfg, Manifest& man) {
  auto pat = std::make_shared<apc::DelonePattern>(load_or_generate(cfg));
  const apc::FluxIndex fx{cfg.flux_min};
  const apc::OperatorMatrix h =
      apc::build_hamiltonian(pat, make_rule(cfg), fx);
  const apc::SpectralData sd = apc::eigensolve(h);
  const apc::FermiProjector proj = apc::fermi_projector(sd, cfg.ef_min);
  apc::CovariantKernel diag(pat, 0.0, true);
  for (int i = 0; i < pat->size(); ++i) diag.set(i, i, proj.P.M(i, i));

  const double half = pat->geometry.L / 2.0;
  const std::vector<double> radii = {0.55 * half, 0.7 * half, 0.85 * half};
  std::vector<double> s_grid;
  for (int i = 1; i <= 5; ++i) s_grid.push_back(pat->geometry.d + 0.2 * i);
  const apc::ResidueTraceReport rep =
      apc::residue_trace_check(diag, radii, s_grid);
  man.j["residue"] = {{"lhs", rep.lhs},
                      {"rhs_estimate", rep.rhs_estimate},
                      {"relative_error", rep.relative_error},
                      {"fit_residual", rep.fit_residual},
                      {"radii", radii},
                      {"per_radius", rep.per_radius}};
  std::printf("residue check: lhs=%.6f rhs=%.6f rel.err=%.4f\n", rep.lhs,
              rep.rhs_estimate, rep.relative_error);
  return 0;
}

void register_options(CLI::App& app, RunConfig& cfg,
                      std::string& config_path, bool& validate_only) {
  app.add_option("experiment", cfg.experiment,
                 "one of: generate spectrum chern map winding verify residue");
  app.add_option("--config", config_path, "config file (key=value sections)");
  app.add_flag("--validate", validate_only,
               "parse and check the config, then exit");
  app.add_option("--experiment", cfg.experiment);
  app.add_option("--L", cfg.L);
  app.add_option("--d", cfg.d);
  app.add_option("--d-min", cfg.d_min);
  app.add_option("--d-max", cfg.d_max);
  app.add_option("--seed", cfg.seed);
  app.add_option("--beta", cfg.beta);
  app.add_option("--range", cfg.range);
  app.add_option("--delta", cfg.delta);
  app.add_option("--flux-min", cfg.flux_min);
  app.add_option("--flux-max", cfg.flux_max);
  app.add_option("--ef-min", cfg.ef_min);
  app.add_option("--ef-max", cfg.ef_max);
  app.add_option("--ef-steps", cfg.ef_steps);
  app.add_option("--kappa", cfg.kappa);
  app.add_option("--tol", cfg.tol);
  app.add_option("--pattern", cfg.pattern_path);
  app.add_option("--out", cfg.out);
  app.add_option("--threads", cfg.threads);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  std::string config_path;
  bool validate_only = false;
  std::vector<std::string> unknown;

  try {
    // First pass only discovers --config; precedence is then
    // defaults < config file < APC_ env < flags, realized by a re-parse on
    // top of the file+env values.
    {
      CLI::App probe{"Delone-pattern topological invariant laboratory"};
      RunConfig scratch;
      bool v = false;
      register_options(probe, scratch, config_path, v);
      probe.parse(argc, argv);
    }
    if (!config_path.empty())
      apply_kv(cfg, parse_config_file(config_path, &unknown));
    apply_env(cfg);
    {
      CLI::App app{"Delone-pattern topological invariant laboratory"};
      std::string ignored;
      register_options(app, cfg, ignored, validate_only);
      app.parse(argc, argv);
    }

    if (validate_only) {
      check_config(cfg);
      if (!unknown.empty()) {
        for (const std::string& k : unknown)
          std::fprintf(stderr, "unknown config key: %s\n", k.c_str());
        return 2;
      }
      std::printf("config OK: experiment=%s\n", cfg.experiment.c_str());
      return 0;
    }
    check_config(cfg);
    for (const std::string& k : unknown)
      std::fprintf(stderr, "warning: ignoring unknown config key: %s\n",
                   k.c_str());

    openblas_set_num_threads(cfg.threads);
    std::filesystem::create_directories(cfg.out);
    Manifest man(cfg);

    int rc = 0;
    if (cfg.experiment == "generate") rc = run_generate(cfg, man);
    else if (cfg.experiment == "verify") rc = run_verify(cfg, man);
    else if (cfg.experiment == "spectrum") rc = run_spectrum(cfg, man);
    else if (cfg.experiment == "chern") rc = run_chern(cfg, man);
    else if (cfg.experiment == "map") rc = run_map(cfg, man);
    else if (cfg.experiment == "winding") rc = run_winding(cfg, man);
    else if (cfg.experiment == "residue") rc = run_residue(cfg, man);
    man.finish(cfg.out);
    return rc;
  } catch (const CLI::ParseError& e) {
    const int rc = CLI::App().exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const apc::ConfigInvalid& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const apc::InvalidParameter& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const apc::Error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
