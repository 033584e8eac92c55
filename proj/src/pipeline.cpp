#include "drlssv/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "drlssv/hartley.hpp"

namespace drlssv {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Advisory lock: refuses to run when another command already writes
/// the same output directory.
class OutputLock {
 public:
  explicit OutputLock(const fs::path& dir) : path_(dir / ".drlssv.lock") {
    fs::create_directories(dir);
    if (fs::exists(path_))
      throw DataError("output directory locked by another run: " +
                      path_.string());
    std::ofstream(path_) << "locked\n";
  }
  ~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }

 private:
  fs::path path_;
};

/// Tracks written artifacts so a failed stage leaves no partial output.
class ArtifactWriter {
 public:
  void write(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write artifact: " + path.string());
    out << content;
    written_.push_back(path);
  }
  void rollback() {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
  }

 private:
  std::vector<fs::path> written_;
};

/// Denoises the 7 per-pollutant grids of one station and flattens them
/// back into (samples x 7) rows aligned with the complete-day rows of
/// the imputed series.
struct StationSamples {
  Eigen::MatrixXd features;            // rows x 7, denoised
  Eigen::VectorXd aqi;                 // observed, recomputed when absent
  std::vector<std::ptrdiff_t> source_rows;
};

StationSamples denoise_station(const StationSeries& imputed,
                               const DenoiseConfig& dn,
                               const AqiBreakpoints& bp,
                               IngestDiagnostics& diag) {
  std::vector<std::ptrdiff_t> day_starts;
  std::array<Eigen::MatrixXd, kNumPollutants> grids;
  for (int p = 0; p < kNumPollutants; ++p) {
    std::vector<std::ptrdiff_t> starts;
    StationGrid g = build_station_grid(imputed, p, p == 0 ? &diag : nullptr,
                                       &starts);
    grids[static_cast<std::size_t>(p)] = denoise(g.values, dn);
    if (p == 0) day_starts = std::move(starts);
  }

  const Eigen::Index P = grids[0].rows(), Q = grids[0].cols();
  StationSamples out;
  out.features.resize(P * Q, kNumPollutants);
  out.aqi.resize(P * Q);
  for (Eigen::Index d = 0; d < P; ++d) {
    for (Eigen::Index h = 0; h < Q; ++h) {
      const Eigen::Index row = d * Q + h;
      const std::ptrdiff_t src =
          day_starts[static_cast<std::size_t>(d)] + h;
      for (int p = 0; p < kNumPollutants; ++p)
        out.features(row, p) = grids[static_cast<std::size_t>(p)](d, h);
      out.source_rows.push_back(src);

      double observed = src < static_cast<std::ptrdiff_t>(imputed.aqi.size())
                            ? imputed.aqi[static_cast<std::size_t>(src)]
                            : kMissing;
      AqiResult recomputed = compute_aqi(
          imputed.readings.row(src).transpose().cwiseMax(0.0), bp);
      if (is_missing(observed)) {
        out.aqi[row] = recomputed.aqi;
      } else {
        out.aqi[row] = observed;
        if (std::abs(observed - recomputed.aqi) > 1.0)
          ++diag.aqi_disagreements;
      }
    }
  }
  return out;
}

}  // namespace

PipelineArtifacts run_pipeline(const PipelineConfig& config, Stage until,
                               bool verbose) {
  config.validate();
  const std::string data_dir = default_data_dir();
  const AqiBreakpoints bp = AqiBreakpoints::load(
      config.paths.breakpoints.empty() ? data_dir + "/cpcb_breakpoints.csv"
                                       : config.paths.breakpoints,
      config.paths.bands.empty() ? data_dir + "/aqi_bands.csv"
                                 : config.paths.bands);

  PipelineArtifacts art;
  OutputLock lock(config.paths.output_dir);
  ArtifactWriter files;
  const fs::path outdir = config.paths.output_dir;

  auto stage = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      files.rollback();
      throw;
    } catch (const std::exception& e) {
      files.rollback();
      throw DataError(std::string("stage ") + name + ": " + e.what());
    }
  };

  // --- ingest + impute ---
  std::vector<StationSeries> stations;
  stage("ingest", [&] {
    if (config.paths.input.empty())
      throw DataError("paths.input is required");
    auto parsed = parse_station_csv(read_file(config.paths.input),
                                    config.ingest.cadence, &art.diagnostics);
    if (parsed.empty()) throw DataError("no stations in input");
    for (auto& s : parsed)
      stations.push_back(impute_missing(s, config.imputation.policy));
  });
  if (verbose)
    std::cerr << "ingest: " << stations.size() << " stations, "
              << art.diagnostics.rows_skipped << " rows skipped\n";
  if (until == Stage::Ingest) return art;

  // --- grid + denoise ---
  const DenoiseConfig dn{config.hartley.keep_fraction};
  std::vector<StationSamples> per_station;
  stage("preprocess", [&] {
    for (const auto& s : stations)
      per_station.push_back(denoise_station(s, dn, bp, art.diagnostics));
    Eigen::Index total = 0;
    for (const auto& ps : per_station) total += ps.features.rows();
    art.features.resize(total, kNumPollutants);
    art.aqi.resize(total);
    Eigen::Index at = 0;
    for (const auto& ps : per_station) {
      art.features.middleRows(at, ps.features.rows()) = ps.features;
      art.aqi.segment(at, ps.aqi.size()) = ps.aqi;
      at += ps.features.rows();
    }
  });
  if (until == Stage::Preprocess) return art;

  // --- homogenize + fit/select ---
  stage("select", [&] {
    Eigen::MatrixXd daily_pool;
    if (!config.paths.input_daily.empty()) {
      auto daily = parse_station_csv(read_file(config.paths.input_daily),
                                     Cadence::Daily, &art.diagnostics);
      std::vector<Eigen::MatrixXd> rows;
      Eigen::Index total = 0;
      for (const auto& s : daily) {
        StationSeries imp = impute_missing(s, config.imputation.policy);
        StationSamples ds = denoise_station(imp, dn, bp, art.diagnostics);
        total += ds.features.rows();
        rows.push_back(std::move(ds.features));
      }
      daily_pool.resize(total, kNumPollutants);
      Eigen::Index at = 0;
      for (const auto& r : rows) {
        daily_pool.middleRows(at, r.rows()) = r;
        at += r.rows();
      }
    } else {
      // No native daily file: daily means of the denoised hourly grid.
      std::vector<Eigen::RowVectorXd> rows;
      for (const auto& ps : per_station) {
        const Eigen::Index days = ps.features.rows() / 24;
        if (days == 0) {
          rows.push_back(ps.features.colwise().mean());
          continue;
        }
        for (Eigen::Index d = 0; d < days; ++d)
          rows.push_back(ps.features.middleRows(d * 24, 24).colwise().mean());
      }
      daily_pool.resize(static_cast<Eigen::Index>(rows.size()),
                        kNumPollutants);
      for (std::size_t i = 0; i < rows.size(); ++i)
        daily_pool.row(static_cast<Eigen::Index>(i)) = rows[i];
    }

    HomogenizedSamples hom = homogenize(art.features, daily_pool);
    LogisticConfig lc;
    lc.ridge = config.selection.ridge;
    // The score is a sum of n terms, so its attainable floor grows with
    // the pool size; keep the strict default for small inputs.
    lc.tol = std::max(lc.tol, 1e-9 * static_cast<double>(hom.size()));
    LogisticModel lm = fit_logistic(hom, lc);
    art.selection = select_features(lm, config.selection.k);
    files.write(outdir / "selection.csv", selection_to_csv(art.selection));
  });
  if (verbose) {
    std::cerr << "selected:";
    for (const auto& s : art.selection.selected) std::cerr << ' ' << s;
    std::cerr << '\n';
  }
  if (until == Stage::Select) return art;

  // --- split + train ---
  Eigen::VectorXd y_train_capped;
  stage("train", [&] {
    std::mt19937_64 rng(config.eval.seed);
    if (config.eval.random_split) {
      std::vector<std::ptrdiff_t> idx(static_cast<std::size_t>(art.aqi.size()));
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      const auto cut = static_cast<std::size_t>(
          config.eval.train_fraction * static_cast<double>(idx.size()));
      art.train_indices.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(cut));
      art.test_indices.assign(idx.begin() + static_cast<std::ptrdiff_t>(cut), idx.end());
      std::sort(art.train_indices.begin(), art.train_indices.end());
      std::sort(art.test_indices.begin(), art.test_indices.end());
    } else {
      // Chronological per station: earliest fraction trains.
      std::ptrdiff_t base = 0;
      for (const auto& ps : per_station) {
        const auto n = static_cast<std::ptrdiff_t>(ps.features.rows());
        const auto cut = static_cast<std::ptrdiff_t>(
            config.eval.train_fraction * static_cast<double>(n));
        for (std::ptrdiff_t i = 0; i < n; ++i)
          (i < cut ? art.train_indices : art.test_indices).push_back(base + i);
        base += n;
      }
    }
    if (art.train_indices.empty() || art.test_indices.empty())
      throw DataError("degenerate train/test split");

    // Cap the training set by uniform subsampling.
    std::vector<std::ptrdiff_t> train = art.train_indices;
    if (train.size() > static_cast<std::size_t>(config.lssv.cap_n)) {
      std::shuffle(train.begin(), train.end(), rng);
      train.resize(static_cast<std::size_t>(config.lssv.cap_n));
      std::sort(train.begin(), train.end());
      art.diagnostics.note("training set capped to " +
                           std::to_string(config.lssv.cap_n) + " of " +
                           std::to_string(art.train_indices.size()));
    }

    const auto& sel = art.selection.selected_indices;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(train.size()),
                      static_cast<Eigen::Index>(sel.size()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) {
      for (std::size_t j = 0; j < sel.size(); ++j)
        X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            art.features(train[i], sel[j]);
      y[static_cast<Eigen::Index>(i)] = art.aqi[train[i]];
    }
    KernelSpec kernel = {config.lssv.kernel, 1.0};
    if (kernel.kind == KernelKind::Rbf)
      kernel.sigma = config.lssv.sigma > 0 ? config.lssv.sigma
                                           : median_pairwise_distance(X);
    art.model = train_lssv(X, y, config.lssv.gamma, kernel);
    y_train_capped = y;
    files.write(outdir / "model.drlssv", save_model(art.model));
  });
  if (until == Stage::Train) return art;

  // --- evaluate + report ---
  stage("evaluate", [&] {
    const auto& sel = art.selection.selected_indices;
    auto subset = [&](const std::vector<std::ptrdiff_t>& idx,
                      Eigen::MatrixXd& X, Eigen::VectorXd& y) {
      X.resize(static_cast<Eigen::Index>(idx.size()),
               static_cast<Eigen::Index>(sel.size()));
      y.resize(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < sel.size(); ++j)
          X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              art.features(idx[i], sel[j]);
        y[static_cast<Eigen::Index>(i)] = art.aqi[idx[i]];
      }
    };
    Eigen::MatrixXd X_test;
    Eigen::VectorXd y_test;
    subset(art.test_indices, X_test, y_test);

    // Baselines train on the same capped data the LSSVM saw.
    LssvPredictor lssv_pred(art.model);
    RidgeBaseline ridge(art.model.training_inputs, y_train_capped);
    KnnBaseline knn(art.model.training_inputs, y_train_capped);

    std::vector<const AqiPredictor*> methods = {&lssv_pred, &ridge, &knn};
    for (const AqiPredictor* m : methods)
      art.reports.push_back(
          evaluate(*m, X_test, y_test, bp, config.eval.positive_set));

    std::vector<std::size_t> sizes;
    for (std::size_t n = 2000; n <= static_cast<std::size_t>(X_test.rows());
         n += 2000)
      sizes.push_back(n);
    if (sizes.empty()) sizes.push_back(static_cast<std::size_t>(X_test.rows()));
    art.sweep = sweep_report(methods, X_test, y_test, sizes, bp,
                             config.eval.positive_set);
    files.write(outdir / "report.csv", art.sweep.to_csv());
    for (const char* metric : {"accuracy", "fpr", "forecast_time_ms", "tau"})
      files.write(outdir / "plots" / (std::string(metric) + ".dat"),
                  art.sweep.plot_data(metric));
  });
  return art;
}

}  // namespace drlssv
