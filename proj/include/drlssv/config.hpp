#pragma once

#include <set>
#include <string>

#include "drlssv/ingestion.hpp"
#include "drlssv/lssv.hpp"

namespace drlssv {

/// Pipeline configuration. Sourced from a TOML-style config file plus
/// `--set section.key=value` overrides; precedence flag > file >
/// default. Unknown keys are rejected.
struct PipelineConfig {
  struct Paths {
    std::string input;          // hourly station CSV
    std::string input_daily;    // optional native daily CSV
    std::string breakpoints;    // defaults to the bundled fixture
    std::string bands;
    std::string model;          // model file (read by predict)
    std::string output_dir = "out";
  } paths;

  struct Ingest {
    Cadence cadence = Cadence::Hourly;
  } ingest;

  struct Hartley {
    double keep_fraction = 0.95;
  } hartley;

  struct Imputation {
    ImputePolicy policy = ImputePolicy::LinearInterpolate;
  } imputation;

  struct Selection {
    int k = 3;
    double ridge = 1e-4;
  } selection;

  struct Lssv {
    KernelKind kernel = KernelKind::Rbf;
    double sigma = 0;  // 0 = median pairwise distance heuristic
    double gamma = 10.0;
    int cap_n = 5000;
  } lssv;

  struct Eval {
    std::set<AqiBand> positive_set = {AqiBand::Poor, AqiBand::VeryPoor,
                                      AqiBand::Severe};
    bool random_split = false;  // default chronological (earliest 70% train)
    double train_fraction = 0.7;
    std::uint64_t seed = 42;
  } eval;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses the TOML-subset config format: `[section]` headers,
/// `key = value` lines, `#` comments, quoted strings, numbers, bools.
PipelineConfig parse_config(const std::string& text,
                            PipelineConfig base = {});

PipelineConfig load_config_file(const std::string& path,
                                PipelineConfig base = {});

/// Applies one `section.key=value` override.
void apply_override(PipelineConfig& cfg, const std::string& assignment);

}  // namespace drlssv
