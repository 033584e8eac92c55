#pragma once

#include <string>
#include <vector>

#include "drlssv/config.hpp"
#include "drlssv/evaluation.hpp"
#include "drlssv/feature_selection.hpp"

namespace drlssv {

/// Pipeline stages in execution order; partial runs stop after the
/// requested stage so the CLI subcommands and `run` share one path.
enum class Stage { Ingest, Preprocess, Select, Train, Evaluate, Report };

struct PipelineArtifacts {
  IngestDiagnostics diagnostics;
  FeatureSelection selection;
  LssvModel model;
  std::vector<EvalReport> reports;  // DR-LSSV plus substitute baselines
  SweepTable sweep;
  // Denoised per-sample features / observed AQI for the whole dataset,
  // in chronological station order (exposed for tests and tooling).
  Eigen::MatrixXd features;  // n x 7
  Eigen::VectorXd aqi;       // n
  std::vector<std::ptrdiff_t> train_indices;
  std::vector<std::ptrdiff_t> test_indices;
};

/// Executes ingest -> impute -> grid -> denoise -> homogenize ->
/// fit/select -> train -> evaluate -> report, writing artifacts under
/// paths.output_dir (selection.csv, model.drlssv, report.csv, plots/).
/// On a stage error the partial artifacts are removed and the error is
/// rethrown with the stage name prefixed.
PipelineArtifacts run_pipeline(const PipelineConfig& config,
                               Stage until = Stage::Report,
                               bool verbose = false);

}  // namespace drlssv
