#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace drlssv {

constexpr int kNumPollutants = 7;

/// Canonical pollutant order; column order of every feature matrix.
/// Units follow the source data: µg/m³ for all except CO (mg/m³).
inline constexpr std::array<const char*, kNumPollutants> kPollutantNames = {
    "PM2.5", "PM10", "SO2", "NOx", "NH3", "CO", "O3"};

int pollutant_index(const std::string& name);  // -1 if unknown

enum class Cadence { Hourly, Daily };

/// Six ordered air-quality bands, least to most severe.
enum class AqiBand : int {
  Good = 0,
  Satisfactory,
  Moderate,
  Poor,
  VeryPoor,
  Severe
};
constexpr int kNumBands = 6;

const char* band_name(AqiBand b);
std::optional<AqiBand> band_from_name(const std::string& name);

/// Missing readings are carried as NaN inside matrices.
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// One station's timestamped pollutant readings at a fixed cadence.
/// Timestamps are naive local instants, seconds since the Unix epoch,
/// strictly increasing.
struct StationSeries {
  std::string station_id;
  Cadence cadence = Cadence::Hourly;
  std::vector<std::int64_t> timestamps;
  Eigen::MatrixXd readings;          // rows x 7, NaN = missing
  std::vector<double> aqi;           // empty, or one per row (NaN = absent)
  std::vector<std::optional<AqiBand>> band;  // empty, or one per row

  std::size_t size() const { return timestamps.size(); }
};

/// Day x Hour matrix of one pollutant at one station. Q = 24 for hourly
/// data, Q = 1 for daily; no missing cells.
struct StationGrid {
  std::string station_id;
  int pollutant = 0;  // index into kPollutantNames
  Eigen::MatrixXd values;  // P x Q

  Eigen::Index days() const { return values.rows(); }
  Eigen::Index hours() const { return values.cols(); }
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Naive calendar conversions (no timezone arithmetic).
std::int64_t timestamp_from_civil(int year, int month, int day, int hour = 0,
                                  int minute = 0);
void civil_from_timestamp(std::int64_t ts, int& year, int& month, int& day,
                          int& hour, int& minute);

/// Parses "YYYY-MM-DD HH:MM" or "YYYY-MM-DD"; nullopt on malformed input.
std::optional<std::int64_t> parse_timestamp(const std::string& text,
                                            Cadence cadence);
std::string format_timestamp(std::int64_t ts, Cadence cadence);

}  // namespace drlssv
