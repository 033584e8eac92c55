#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "drlssv/types.hpp"

namespace drlssv {

enum class ImputePolicy { LinearInterpolate, ColumnMedian, ForwardFill };

const char* impute_policy_name(ImputePolicy p);
std::optional<ImputePolicy> impute_policy_from_name(const std::string& name);

/// Row-level problems are tallied here instead of aborting the parse.
struct IngestDiagnostics {
  std::size_t rows_skipped = 0;
  std::size_t cells_missing = 0;
  std::size_t trailing_dropped = 0;   // readings dropped by grid building
  std::size_t aqi_disagreements = 0;  // source AQI vs recomputed, > 1 unit
  std::vector<std::string> messages;

  void note(std::string msg) { messages.push_back(std::move(msg)); }
};

/// Parses station CSV with header
/// `StationId,Datetime,PM2.5,PM10,SO2,NOx,NH3,CO,O3[,AQI,AQI_Bucket]`
/// (a `City` column is accepted in place of `StationId`). One
/// StationSeries per distinct station, rows sorted by timestamp.
/// Throws SchemaError naming the first missing required column.
std::vector<StationSeries> parse_station_csv(std::string_view csv_text,
                                             Cadence cadence,
                                             IngestDiagnostics* diag = nullptr);

/// Serializes back to the input schema (decimal point, comma separator).
std::string serialize_station_series(const StationSeries& series);

/// Replaces every missing cell; non-missing cells are untouched.
/// LinearInterpolate falls back to forward/backward fill at the edges.
/// Throws DataError for an entirely-missing column.
StationSeries impute_missing(const StationSeries& series, ImputePolicy policy);

/// Reshapes a fully imputed series into the Day x Hour grid for one
/// pollutant. Partial leading/trailing days are dropped (tallied in
/// diag). Throws DataError when no complete day remains.
StationGrid build_station_grid(const StationSeries& series, int pollutant,
                               IngestDiagnostics* diag = nullptr,
                               std::vector<std::ptrdiff_t>* day_start_rows =
                                   nullptr);

}  // namespace drlssv
