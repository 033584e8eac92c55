#pragma once

#include <string>
#include <vector>

#include "drlssv/types.hpp"

namespace drlssv {

/// One piecewise-linear segment mapping a concentration range onto an
/// index range.
struct AqiSegment {
  double conc_low = 0;
  double conc_high = 0;
  double index_low = 0;
  double index_high = 0;
};

struct BandRange {
  double aqi_low = 0;
  double aqi_high = 0;
  AqiBand band = AqiBand::Good;
};

/// Per-pollutant breakpoint segments plus the band table partitioning
/// [0, 500]. Loaded from the bundled CSV fixtures; band upper edges are
/// inclusive (AQI 100 -> Satisfactory).
struct AqiBreakpoints {
  std::array<std::vector<AqiSegment>, kNumPollutants> segments;
  std::vector<BandRange> bands;

  static AqiBreakpoints load(const std::string& breakpoints_csv_path,
                             const std::string& bands_csv_path);
  /// Loads the CPCB fixture bundled under the project data directory.
  static AqiBreakpoints load_default();

  void validate() const;  // throws ConfigError on gaps/overlaps

  /// Piecewise-linear sub-index for one pollutant; saturates at 500
  /// above the last segment.
  double sub_index(int pollutant, double concentration) const;
  AqiBand band_of(double aqi) const;
};

struct AqiResult {
  double aqi = 0;
  AqiBand band = AqiBand::Good;
};

/// AQI = max of the 7 sub-indices, clamped to [0, 500].
/// Throws DataError on negative concentrations.
AqiResult compute_aqi(const Eigen::Matrix<double, kNumPollutants, 1>& conc,
                      const AqiBreakpoints& bp);

/// Directory holding the bundled CSV fixtures. Compile-time default,
/// overridable via the DRLSSV_DATA environment variable.
std::string default_data_dir();

}  // namespace drlssv
