// drlssv: command-line front end for the DR-LSSV forecasting pipeline.
//
// Exit codes: 0 success, 1 runtime/data failure, 2 usage or
// configuration error. Diagnostics go to stderr; tabular results to
// stdout or the configured output directory.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drlssv/aqi.hpp"
#include "drlssv/config.hpp"
#include "drlssv/pipeline.hpp"
#include "drlssv/synth.hpp"

namespace {

using namespace drlssv;

struct GlobalOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  bool verbose = false;
  bool has_seed = false;
  std::uint64_t seed = 42;
};

PipelineConfig make_config(const GlobalOpts& g) {
  PipelineConfig cfg;
  if (!g.config_path.empty()) cfg = load_config_file(g.config_path, cfg);
  for (const auto& ov : g.overrides) apply_override(cfg, ov);
  if (g.has_seed) cfg.eval.seed = g.seed;
  cfg.validate();
  return cfg;
}

void print_report(const EvalReport& r, std::ostream& os) {
  os << r.method_name << ": n=" << r.n_samples << " accuracy=" << r.accuracy
     << " fpr=" << r.fpr << " mae_aqi=" << r.mae_aqi
     << " forecast_ms=" << r.forecast_time_ms << " tau=" << r.tau_verdict.tau
     << " verdict=" << band_name(r.tau_verdict.band);
  if (r.tau_verdict.ties_degenerate) os << " (all pairs tied)";
  os << "\n";
}

int run_stage(const GlobalOpts& g, Stage until) {
  PipelineConfig cfg = make_config(g);
  PipelineArtifacts art = run_pipeline(cfg, until, g.verbose);
  std::cerr << "rows skipped: " << art.diagnostics.rows_skipped
            << ", missing cells imputed: " << art.diagnostics.cells_missing
            << ", partial-day readings dropped: "
            << art.diagnostics.trailing_dropped
            << ", AQI disagreements: " << art.diagnostics.aqi_disagreements
            << "\n";
  if (g.verbose)
    for (const auto& m : art.diagnostics.messages) std::cerr << "  " << m << "\n";
  if (until >= Stage::Select && !art.selection.selected_indices.empty()) {
    std::cout << "selected features:";
    for (int j : art.selection.selected_indices)
      std::cout << " " << kPollutantNames[j];
    std::cout << "\n";
  }
  if (until >= Stage::Evaluate)
    for (const auto& r : art.reports) print_report(r, std::cout);
  return 0;
}

int run_synth(const GlobalOpts& g, SynthSpec spec, const std::string& out_dir) {
  if (g.has_seed) spec.seed = g.seed;
  AqiBreakpoints bp = AqiBreakpoints::load_default();
  SynthData data = generate_synth(spec, bp);
  write_synth_files(data, out_dir);
  std::cerr << "wrote " << out_dir << "/hourly.csv, daily.csv, clean.csv ("
            << spec.n_stations << " stations x " << spec.days << " days)\n";
  return 0;
}

int run_predict(const GlobalOpts& g, const std::string& features_path,
                const std::string& out_path) {
  PipelineConfig cfg = make_config(g);
  if (cfg.paths.model.empty())
    throw ConfigError("predict requires paths.model (model file)");
  std::ifstream min(cfg.paths.model, std::ios::binary);
  if (!min) throw DataError("cannot open model file: " + cfg.paths.model);
  std::ostringstream mss;
  mss << min.rdbuf();
  LssvModel model = load_model(mss.str());

  std::ifstream fin(features_path, std::ios::binary);
  if (!fin) throw DataError("cannot open features file: " + features_path);
  AqiBreakpoints bp =
      cfg.paths.breakpoints.empty()
          ? AqiBreakpoints::load_default()
          : AqiBreakpoints::load(cfg.paths.breakpoints, cfg.paths.bands);

  std::ostream* os = &std::cout;
  std::ofstream fout;
  if (!out_path.empty()) {
    fout.open(out_path, std::ios::binary);
    if (!fout) throw DataError("cannot open output file: " + out_path);
    os = &fout;
  }
  *os << "aqi,band\n";
  const auto k = model.training_inputs.cols();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(fin, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ls(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used == 0) numeric = false;
        vals.push_back(v);
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric && lineno == 1) continue;  // header row
    if (!numeric)
      throw DataError("features line " + std::to_string(lineno) +
                      ": non-numeric value");
    if (static_cast<Eigen::Index>(vals.size()) != k)
      throw DataError("features line " + std::to_string(lineno) + ": expected " +
                      std::to_string(k) + " values, got " +
                      std::to_string(vals.size()));
    Eigen::VectorXd x =
        Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size());
    AqiResult r = classify_aqi(model, x, bp);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r.aqi);
    *os << buf << "," << band_name(r.band) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DR-LSSV air-quality forecasting pipeline"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "Pipeline config file (TOML)");
  app.add_option("--set", g.overrides,
                 "Override a config value (section.key=value); repeatable");
  app.add_flag("--verbose", g.verbose, "Per-stage progress on stderr");
  auto* seed_opt =
      app.add_option("--seed", g.seed, "Random seed (split / synth)");

  Stage until = Stage::Report;
  app.add_subcommand("ingest", "Parse and impute the input CSV")
      ->callback([&] { until = Stage::Ingest; })
      ->fallthrough();
  app.add_subcommand("preprocess", "Ingest plus Hartley denoising")
      ->callback([&] { until = Stage::Preprocess; })
      ->fallthrough();
  app.add_subcommand("select", "Preprocess plus feature selection")
      ->callback([&] { until = Stage::Select; })
      ->fallthrough();
  app.add_subcommand("train", "Select plus LSSVM training")
      ->callback([&] { until = Stage::Train; })
      ->fallthrough();
  app.add_subcommand("evaluate", "Train plus held-out evaluation")
      ->callback([&] { until = Stage::Evaluate; })
      ->fallthrough();
  app.add_subcommand("report", "Full pipeline with sweep report")
      ->callback([&] { until = Stage::Report; })
      ->fallthrough();
  app.add_subcommand("run", "Alias for report: the full pipeline")
      ->callback([&] { until = Stage::Report; })
      ->fallthrough();

  SynthSpec spec;
  std::string synth_out = "synth";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->fallthrough();
  synth->add_option("--out", synth_out, "Output directory");
  synth->add_option("--stations", spec.n_stations, "Number of stations")
      ->check(CLI::PositiveNumber);
  synth->add_option("--days", spec.days, "Days per station")
      ->check(CLI::PositiveNumber);
  synth->add_option("--noise", spec.noise_sd, "Relative noise level");
  synth->add_option("--spike-rate", spec.spike_rate, "Impulse probability")
      ->check(CLI::Range(0.0, 1.0));

  std::string predict_in, predict_out;
  auto* predict = app.add_subcommand(
      "predict", "Score feature rows (CSV) with a trained model");
  predict->fallthrough();
  predict->add_option("features", predict_in, "CSV of selected-feature rows")
      ->required();
  predict->add_option("--output", predict_out, "Write predictions here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  g.has_seed = seed_opt->count() > 0;
  try {
    if (synth->parsed()) return run_synth(g, spec, synth_out);
    if (predict->parsed()) return run_predict(g, predict_in, predict_out);
    return run_stage(g, until);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
