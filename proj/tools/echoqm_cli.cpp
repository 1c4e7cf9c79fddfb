// echoqm: command-line front end. Every subcommand writes its results and a
// manifest.json into --out-dir. Failures print one JSON object on stderr and
// exit with the code of their error category.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "echoqm/ensemble.hpp"
#include "echoqm/errors.hpp"
#include "echoqm/io.hpp"
#include "echoqm/metrology.hpp"
#include "echoqm/protocol.hpp"
#include "echoqm/wigner.hpp"

namespace fs = std::filesystem;
using namespace echoqm;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kPaperDim = 1050;

struct ConfigSource {
  std::string preset_name;
  std::string config_path;
  std::vector<std::string> overrides;
  bool paper_dim = false;

  void attach(CLI::App* app) {
    auto* p = app->add_option("--preset", preset_name, "Named operating point");
    auto* c = app->add_option("--config", config_path, "Config JSON file");
    p->excludes(c);
    app->add_option("--set", overrides, "Override a config field, key=value (repeatable)");
    app->add_flag("--paper-dim", paper_dim, "Use the full Fock dimension d = 1050");
  }

  ProtocolConfig resolve() const {
    ProtocolConfig config;
    if (!preset_name.empty()) config = preset(preset_name);
    if (!config_path.empty()) config = load_config(config_path);
    for (const std::string& o : overrides) apply_override(config, o);
    if (paper_dim) config.dim = kPaperDim;
    config.validate();
    return config;
  }
};

int default_workers() {
  if (const char* env = std::getenv("ECHOQM_WORKERS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, std::string("ECHOQM_WORKERS is not an integer: ") + env);
    }
  }
  return 1;
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

class Session {
 public:
  Session(std::string command, std::vector<std::string> argv, fs::path out_dir)
      : command_(std::move(command)), argv_(std::move(argv)), out_dir_(std::move(out_dir)),
        start_(std::chrono::steady_clock::now()), started_at_(timestamp()) {}

  void write(const std::string& name, std::string_view content) {
    write_atomic(out_dir_ / name, content);
    artifacts_.push_back(name);
  }
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  void finish(Json extra) {
    Json manifest{{"tool", "echoqm"},
                  {"version", kVersion},
                  {"command", command_},
                  {"replay", argv_},
                  {"artifacts", artifacts_},
                  {"started_at", started_at_},
                  {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count()}};
    for (auto& [k, v] : extra.items()) manifest[k] = v;
    write_atomic(out_dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  fs::path out_dir_;
  std::chrono::steady_clock::time_point start_;
  std::string started_at_;
  std::vector<std::string> artifacts_;
};

Json config_block(const ProtocolConfig& c) { return Json{{"config", to_json(c)}, {"config_hash", config_hash(c)}}; }

std::function<void(int, int)> progress_printer(bool quiet) {
  if (quiet) return {};
  return [](int done, int total) { std::cerr << "progress " << done << "/" << total << "\n"; };
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "not a number list: '" + text + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Json fit_report(const std::vector<MetrologyRecord>& records, const std::string& mode, bool weighted) {
  Json report{{"mode", mode}, {"points", records.size()}};
  if (mode == "gain_hist") {
    std::vector<double> gains;
    for (const auto& r : records) gains.push_back(r.gain_max);
    const GaussianFit g = fit_gaussian(gains);
    report["mu"] = g.mu;
    report["sigma"] = g.sigma;
    return report;
  }
  std::vector<std::pair<double, double>> points;
  for (const auto& r : records) points.emplace_back(r.n_mean, mode == "cfi_scaling" ? r.cfi_max : r.theta_b);
  const PowerLawFit fit = fit_power_law(points, weighted);
  report["a"] = fit.a;
  report["b"] = fit.b;
  report["weighting"] = weighted ? "half ln-spacing to neighbours" : "uniform";
  report["residual_rms"] = fit.residual_rms;
  return report;
}

int run_cli(std::vector<std::string> args) {
  CLI::App app{"Echoed random quantum metrology: simulation, ensembles and fits"};
  app.require_subcommand(1);
  std::string out_dir = "out";
  int workers = default_workers();
  bool quiet = false;
  std::uint64_t seed_base = 0;
  int n = 10;

  ConfigSource source;
  double theta = 0.0;
  bool optimize = false;
  auto* run = app.add_subcommand("run", "Evaluate one realization at a bias phase");
  source.attach(run);
  run->add_option("--theta", theta, "Bias phase in radians");
  run->add_flag("--optimize", optimize, "Also search the best bias phase");
  run->add_option("--out-dir", out_dir);

  ConfigSource ens_source;
  bool keep_curves = false;
  auto* ensemble = app.add_subcommand("ensemble", "Run an ensemble of realizations");
  ens_source.attach(ensemble);
  ensemble->add_option("--n", n, "Realizations")->check(CLI::PositiveNumber);
  ensemble->add_option("--seed-base", seed_base);
  ensemble->add_option("--workers", workers);
  ensemble->add_option("--out-dir", out_dir);
  ensemble->add_flag("--curves", keep_curves, "Keep the CFI(theta) scan in summary.json");
  ensemble->add_flag("--quiet", quiet);

  ConfigSource sweep_source;
  std::string eps_list, chiT_list;
  auto* sweep = app.add_subcommand("sweep", "Mean and std of the gain over an (epsilon, chiT) grid");
  sweep_source.attach(sweep);
  sweep->add_option("--eps", eps_list, "Comma-separated epsilon values")->required();
  sweep->add_option("--chiT", chiT_list, "Comma-separated chiT values")->required();
  sweep->add_option("--n", n)->check(CLI::PositiveNumber);
  sweep->add_option("--seed-base", seed_base);
  sweep->add_option("--workers", workers);
  sweep->add_option("--out-dir", out_dir);
  sweep->add_flag("--quiet", quiet);

  ConfigSource fluct_source;
  std::string rel_list;
  int n_fluct = 10;
  auto* fluct = app.add_subcommand("fluct", "Gain against control-noise strength");
  fluct_source.attach(fluct);
  fluct->add_option("--rel", rel_list, "Comma-separated relative strengths delta_eps/epsilon")->required();
  fluct->add_option("--n", n, "Drive realizations")->check(CLI::PositiveNumber);
  fluct->add_option("--n-fluct", n_fluct, "Noise draws per drive")->check(CLI::PositiveNumber);
  fluct->add_option("--seed-base", seed_base);
  fluct->add_option("--workers", workers);
  fluct->add_option("--out-dir", out_dir);
  fluct->add_flag("--quiet", quiet);

  ConfigSource wig_source;
  std::vector<std::string> stage_names{"initial", "post_prep", "post_probe", "post_echo"};
  double extent = 5.0;
  int resolution = 101;
  auto* wigner = app.add_subcommand("wigner", "Wigner grids of the protocol stages");
  wig_source.attach(wigner);
  wigner->add_option("--theta", theta);
  wigner->add_option("--stages", stage_names)->delimiter(',');
  wigner->add_option("--extent", extent, "Half extent in x and p");
  wigner->add_option("--resolution", resolution)->check(CLI::Range(2, 4001));
  wigner->add_option("--workers", workers);
  wigner->add_option("--out-dir", out_dir);

  std::string records_path, mode;
  bool unweighted = false;
  auto* fit = app.add_subcommand("fit", "Fit a records CSV");
  fit->add_option("records", records_path, "records.csv")->required();
  fit->add_option("--mode", mode)->required()->check(CLI::IsMember({"cfi_scaling", "thetab_scaling", "gain_hist"}));
  fit->add_flag("--unweighted", unweighted, "Plain least squares in log space");
  fit->add_option("--out-dir", out_dir);

  std::string manifest_path;
  std::string replay_out;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest_path)->required();
  replay->add_option("--out-dir", replay_out, "Write there instead of the recorded directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const std::vector<std::string> argv(args.begin() + 1, args.end());
  EnsembleOptions eopts;
  eopts.workers = workers;
  eopts.progress = progress_printer(quiet);

  if (*run) {
    const ProtocolConfig config = source.resolve();
    Session session("run", argv, out_dir);
    const ProtocolOutcome outcome = run_protocol(config, theta);
    Json j = to_json(outcome);
    j["theta"] = theta;
    j["config"] = to_json(config);
    session.write_json("outcome.json", j);
    if (optimize) session.write_json("record.json", to_json(optimize_bias(config)));
    std::cout << j.dump() << "\n";
    session.finish(config_block(config));
  } else if (*ensemble) {
    const ProtocolConfig config = ens_source.resolve();
    eopts.search.keep_curve = keep_curves;
    Session session("ensemble", argv, out_dir);
    const EnsembleSummary s = run_ensemble(config, n, seed_base, eopts);
    session.write("records.csv", records_csv(s.records));
    session.write_json("summary.json", to_json(s));
    Json extra = config_block(config);
    extra["seed_base"] = seed_base;
    extra["n_realizations"] = n;
    extra["n_excluded"] = s.failures.size();
    session.finish(extra);
    std::cout << "mean_gain " << format_double(s.mean_gain) << " std_gain " << format_double(s.std_gain) << " excluded "
              << s.failures.size() << "\n";
  } else if (*sweep) {
    const ProtocolConfig config = sweep_source.resolve();
    Session session("sweep", argv, out_dir);
    const SweepGrid grid = sweep_heatmap(config, parse_list(eps_list), parse_list(chiT_list), n, seed_base, eopts);
    session.write("sweep_mean.csv", matrix_csv("chiT\\eps", grid.chiT_values, grid.eps_values, grid.mean_matrix));
    session.write("sweep_std.csv", matrix_csv("chiT\\eps", grid.chiT_values, grid.eps_values, grid.std_matrix));
    std::vector<MetrologyRecord> all;
    Json cells = Json::array();
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
      const EnsembleSummary& s = grid.cells[c];
      all.insert(all.end(), s.records.begin(), s.records.end());
      cells.push_back(Json{{"cell", c},
                           {"epsilon", s.base.epsilon},
                           {"chiT", s.base.T},
                           {"seed_base", s.seed_base},
                           {"n_succeeded", s.records.size()},
                           {"n_excluded", s.n_requested - static_cast<int>(s.records.size())}});
    }
    session.write("records.csv", records_csv(all));
    Json extra = config_block(config);
    extra["eps_values"] = grid.eps_values;
    extra["chiT_values"] = grid.chiT_values;
    extra["n_realizations"] = n;
    extra["seed_base"] = seed_base;
    extra["cells"] = cells;
    extra["failure_log"] = grid.failure_log;
    session.finish(extra);
  } else if (*fluct) {
    const ProtocolConfig config = fluct_source.resolve();
    Session session("fluct", argv, out_dir);
    std::vector<double> deltas;
    for (double r : parse_list(rel_list)) deltas.push_back(r * config.epsilon);
    const auto rows = fluctuation_sweep(config, deltas, n, n_fluct, seed_base, eopts);
    std::string csv = "delta_eps,relative,mean_gain,std_gain,n_succeeded,n_excluded\n";
    Json excluded = Json::array();
    for (const FluctuationRow& r : rows) {
      csv += format_double(r.delta_eps) + ',' + format_double(r.relative) + ',' + format_double(r.summary.mean_gain) +
             ',' + format_double(r.summary.std_gain) + ',' + std::to_string(r.summary.records.size()) + ',' +
             std::to_string(r.summary.failures.size()) + '\n';
      excluded.push_back(r.summary.failures.size());
    }
    session.write("fluct.csv", csv);
    Json extra = config_block(config);
    extra["seed_base"] = seed_base;
    extra["n_base"] = n;
    extra["n_fluct"] = n_fluct;
    extra["n_excluded"] = excluded;
    session.finish(extra);
  } else if (*wigner) {
    const ProtocolConfig config = wig_source.resolve();
    std::set<WignerStage> stages;
    for (const std::string& s : stage_names) stages.insert(parse_wigner_stage(s));
    Session session("wigner", argv, out_dir);
    WignerOptions wopts;
    wopts.workers = workers;
    const std::string hash = config_hash(config);
    for (const WignerGrid& g : snapshot_protocol(config, theta, stages, extent, resolution, {}, wopts)) {
      session.write("wigner_" + g.stage + ".csv", wigner_csv(g));
      session.write_json("wigner_" + g.stage + ".json", wigner_sidecar(g, extent, resolution, hash));
    }
    session.finish(config_block(config));
  } else if (*fit) {
    const auto records = parse_records_csv(read_file(records_path));
    Session session("fit", argv, out_dir);
    const Json report = fit_report(records, mode, !unweighted);
    session.write_json("fit_" + mode + ".json", report);
    std::cout << report.dump() << "\n";
    session.finish(Json::object());
  } else if (*replay) {
    Json manifest;
    try {
      manifest = Json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::SchemaMismatch, manifest_path + ": " + e.what());
    }
    if (!manifest.contains("replay") || !manifest["replay"].is_array()) {
      fail(ErrorCode::SchemaMismatch, manifest_path + " has no replay command");
    }
    std::vector<std::string> again{args.front()};
    for (const auto& a : manifest["replay"]) again.push_back(a.get<std::string>());
    if (again.size() > 1 && again[1] == "replay") fail(ErrorCode::SchemaMismatch, "nested replay");
    if (!replay_out.empty()) {
      // drop the recorded --out-dir and point at the new one
      std::vector<std::string> filtered;
      for (std::size_t i = 0; i < again.size(); ++i) {
        if (again[i] == "--out-dir") {
          ++i;
          continue;
        }
        if (again[i].rfind("--out-dir=", 0) == 0) continue;
        filtered.push_back(again[i]);
      }
      filtered.push_back("--out-dir");
      filtered.push_back(replay_out);
      again = filtered;
    }
    return run_cli(again);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    return run_cli(args);
  } catch (const Error& e) {
    std::cerr << Json{{"error", error_name(e.code())}, {"exit_code", exit_code(e.code())}, {"message", e.what()}}.dump()
              << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", "Internal"}, {"exit_code", 1}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
}
