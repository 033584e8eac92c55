#include "drlssv/ingestion.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "csv.hpp"

namespace drlssv {

// ---------------------------------------------------------------------------
// Calendar helpers (naive local time, Hinnant's civil-days algorithm).
// ---------------------------------------------------------------------------

static std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

static void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

std::int64_t timestamp_from_civil(int year, int month, int day, int hour,
                                  int minute) {
  return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60;
}

void civil_from_timestamp(std::int64_t ts, int& year, int& month, int& day,
                          int& hour, int& minute) {
  std::int64_t z = ts / 86400;
  std::int64_t rem = ts - z * 86400;
  if (rem < 0) {
    rem += 86400;
    --z;
  }
  civil_from_days(z, year, month, day);
  hour = static_cast<int>(rem / 3600);
  minute = static_cast<int>((rem % 3600) / 60);
}

std::optional<std::int64_t> parse_timestamp(const std::string& text,
                                            Cadence cadence) {
  int y, mo, d, h = 0, mi = 0;
  if (cadence == Cadence::Hourly) {
    if (std::sscanf(text.c_str(), "%d-%d-%d %d:%d", &y, &mo, &d, &h, &mi) != 5)
      return std::nullopt;
  } else {
    if (std::sscanf(text.c_str(), "%d-%d-%d", &y, &mo, &d) != 3)
      return std::nullopt;
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
      mi > 59)
    return std::nullopt;
  return timestamp_from_civil(y, mo, d, h, mi);
}

std::string format_timestamp(std::int64_t ts, Cadence cadence) {
  int y, mo, d, h, mi;
  civil_from_timestamp(ts, y, mo, d, h, mi);
  char buf[32];
  if (cadence == Cadence::Hourly)
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d", y, mo, d, h,
                  mi);
  else
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, mo, d);
  return buf;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

const char* impute_policy_name(ImputePolicy p) {
  switch (p) {
    case ImputePolicy::LinearInterpolate: return "LinearInterpolate";
    case ImputePolicy::ColumnMedian: return "ColumnMedian";
    case ImputePolicy::ForwardFill: return "ForwardFill";
  }
  return "?";
}

std::optional<ImputePolicy> impute_policy_from_name(const std::string& name) {
  if (name == "LinearInterpolate") return ImputePolicy::LinearInterpolate;
  if (name == "ColumnMedian") return ImputePolicy::ColumnMedian;
  if (name == "ForwardFill") return ImputePolicy::ForwardFill;
  return std::nullopt;
}

namespace {

struct RawRow {
  std::int64_t ts;
  Eigen::Matrix<double, kNumPollutants, 1> values;
  double aqi;
  std::optional<AqiBand> band;
};

}  // namespace

std::vector<StationSeries> parse_station_csv(std::string_view csv_text,
                                             Cadence cadence,
                                             IngestDiagnostics* diag) {
  IngestDiagnostics local;
  if (!diag) diag = &local;

  auto lines = csv::split_lines(csv_text);
  if (lines.empty()) throw SchemaError("empty input: missing header row");
  auto header = csv::split_line(lines[0]);

  auto find_col = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1
                              : static_cast<int>(it - header.begin());
  };

  int station_col = find_col("StationId");
  if (station_col < 0) station_col = find_col("City");
  if (station_col < 0)
    throw SchemaError("missing required column: StationId");
  int datetime_col = find_col("Datetime");
  if (datetime_col < 0) datetime_col = find_col("Date");
  if (datetime_col < 0)
    throw SchemaError("missing required column: Datetime");

  std::array<int, kNumPollutants> poll_col;
  for (int p = 0; p < kNumPollutants; ++p) {
    poll_col[p] = find_col(kPollutantNames[p]);
    if (poll_col[p] < 0)
      throw SchemaError(std::string("missing required column: ") +
                        kPollutantNames[p]);
  }
  int aqi_col = find_col("AQI");
  int bucket_col = find_col("AQI_Bucket");

  std::map<std::string, std::vector<RawRow>> by_station;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = csv::split_line(lines[i]);
    auto need = static_cast<std::size_t>(
        std::max({station_col, datetime_col,
                  *std::max_element(poll_col.begin(), poll_col.end())}));
    if (f.size() <= need) {
      ++diag->rows_skipped;
      diag->note("line " + std::to_string(i + 1) + ": too few fields");
      continue;
    }
    auto ts = parse_timestamp(f[datetime_col], cadence);
    if (!ts) {
      ++diag->rows_skipped;
      diag->note("line " + std::to_string(i + 1) + ": unparseable timestamp '" +
                 f[datetime_col] + "'");
      continue;
    }
    RawRow row;
    row.ts = *ts;
    bool bad = false;
    for (int p = 0; p < kNumPollutants; ++p) {
      const std::string& cell = f[poll_col[p]];
      if (cell.empty()) {
        row.values[p] = kMissing;
        ++diag->cells_missing;
        continue;
      }
      auto v = csv::parse_double(cell);
      if (!v) {
        row.values[p] = kMissing;
        ++diag->cells_missing;
        continue;
      }
      if (*v < 0) {
        ++diag->rows_skipped;
        diag->note("line " + std::to_string(i + 1) +
                   ": negative concentration in " + kPollutantNames[p]);
        bad = true;
        break;
      }
      row.values[p] = *v;
    }
    if (bad) continue;
    row.aqi = kMissing;
    if (aqi_col >= 0 && static_cast<std::size_t>(aqi_col) < f.size()) {
      if (auto v = csv::parse_double(f[aqi_col]); v && *v >= 0 && *v <= 500)
        row.aqi = *v;
    }
    if (bucket_col >= 0 && static_cast<std::size_t>(bucket_col) < f.size())
      row.band = band_from_name(f[bucket_col]);
    by_station[f[station_col]].push_back(std::move(row));
  }

  std::vector<StationSeries> out;
  for (auto& [sid, rows] : by_station) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.ts < b.ts; });
    // Duplicate timestamps would break the strictly-increasing invariant;
    // keep the first occurrence.
    std::vector<const RawRow*> kept;
    for (const auto& r : rows) {
      if (!kept.empty() && kept.back()->ts == r.ts) {
        ++diag->rows_skipped;
        diag->note("station " + sid + ": duplicate timestamp " +
                   format_timestamp(r.ts, cadence));
        continue;
      }
      kept.push_back(&r);
    }
    StationSeries s;
    s.station_id = sid;
    s.cadence = cadence;
    const auto n = static_cast<Eigen::Index>(kept.size());
    s.readings.resize(n, kNumPollutants);
    s.timestamps.reserve(kept.size());
    s.aqi.reserve(kept.size());
    s.band.reserve(kept.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      s.timestamps.push_back(kept[i]->ts);
      s.readings.row(i) = kept[i]->values.transpose();
      s.aqi.push_back(kept[i]->aqi);
      s.band.push_back(kept[i]->band);
    }
    out.push_back(std::move(s));
  }
  return out;
}

static std::string format_value(double v) {
  if (is_missing(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string serialize_station_series(const StationSeries& series) {
  std::ostringstream out;
  out << "StationId,Datetime";
  for (const char* p : kPollutantNames) out << ',' << p;
  out << ",AQI,AQI_Bucket\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.station_id << ','
        << format_timestamp(series.timestamps[i], series.cadence);
    for (int p = 0; p < kNumPollutants; ++p)
      out << ',' << format_value(series.readings(static_cast<Eigen::Index>(i), p));
    out << ',' << (i < series.aqi.size() ? format_value(series.aqi[i]) : "");
    out << ',';
    if (i < series.band.size() && series.band[i]) out << band_name(*series.band[i]);
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Imputation
// ---------------------------------------------------------------------------

StationSeries impute_missing(const StationSeries& series, ImputePolicy policy) {
  StationSeries out = series;
  const Eigen::Index n = out.readings.rows();
  for (int p = 0; p < kNumPollutants; ++p) {
    auto col = out.readings.col(p);
    std::vector<double> present;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!is_missing(col[i])) present.push_back(col[i]);
    if (present.empty())
      throw DataError(std::string("pollutant ") + kPollutantNames[p] +
                      " entirely missing for station " + series.station_id);
    if (present.size() == static_cast<std::size_t>(n)) continue;

    switch (policy) {
      case ImputePolicy::ColumnMedian: {
        std::sort(present.begin(), present.end());
        const std::size_t m = present.size();
        double median = (m % 2 == 1)
                            ? present[m / 2]
                            : 0.5 * (present[m / 2 - 1] + present[m / 2]);
        for (Eigen::Index i = 0; i < n; ++i)
          if (is_missing(col[i])) col[i] = median;
        break;
      }
      case ImputePolicy::ForwardFill: {
        double last = kMissing;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (is_missing(col[i]))
            col[i] = last;
          else
            last = col[i];
        }
        // Leading gap: backfill from the first observation.
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (is_missing(col[i]))
            col[i] = last;
          else
            last = col[i];
        }
        break;
      }
      case ImputePolicy::LinearInterpolate: {
        Eigen::Index prev = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (!is_missing(col[i])) {
            prev = i;
            continue;
          }
          Eigen::Index next = i + 1;
          while (next < n && is_missing(col[next])) ++next;
          if (prev < 0) {
            // Leading edge: forward-fill backwards from the next value.
            for (Eigen::Index j = 0; j < next; ++j) col[j] = col[next];
          } else if (next >= n) {
            for (Eigen::Index j = i; j < n; ++j) col[j] = col[prev];
          } else {
            for (Eigen::Index j = i; j < next; ++j) {
              double t = static_cast<double>(j - prev) /
                         static_cast<double>(next - prev);
              col[j] = col[prev] + t * (col[next] - col[prev]);
            }
          }
          i = next - 1;
        }
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid construction
// ---------------------------------------------------------------------------

StationGrid build_station_grid(const StationSeries& series, int pollutant,
                               IngestDiagnostics* diag,
                               std::vector<std::ptrdiff_t>* day_start_rows) {
  IngestDiagnostics local;
  if (!diag) diag = &local;
  if (pollutant < 0 || pollutant >= kNumPollutants)
    throw DataError("pollutant index out of range");
  for (Eigen::Index i = 0; i < series.readings.rows(); ++i)
    if (is_missing(series.readings(i, pollutant)))
      throw DataError("series must be imputed before grid construction");

  StationGrid grid;
  grid.station_id = series.station_id;
  grid.pollutant = pollutant;

  const Eigen::Index n = series.readings.rows();
  if (series.cadence == Cadence::Daily) {
    if (n == 0) throw DataError("zero complete days for station " +
                                series.station_id);
    grid.values.resize(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      grid.values(i, 0) = series.readings(i, pollutant);
      if (day_start_rows) day_start_rows->push_back(i);
    }
    return grid;
  }

  // Hourly: a complete day is a run of 24 rows covering hours 0..23 of
  // one calendar day.
  std::vector<std::vector<double>> days;
  Eigen::Index i = 0;
  std::size_t dropped = 0;
  while (i < n) {
    int y, mo, d, h, mi;
    civil_from_timestamp(series.timestamps[static_cast<std::size_t>(i)], y, mo,
                         d, h, mi);
    if (h != 0) {
      ++dropped;
      ++i;
      continue;
    }
    const std::int64_t day_start = series.timestamps[static_cast<std::size_t>(i)];
    bool complete = true;
    if (i + 23 >= n) {
      complete = false;
    } else {
      for (int k = 1; k < 24; ++k)
        if (series.timestamps[static_cast<std::size_t>(i + k)] !=
            day_start + k * 3600) {
          complete = false;
          break;
        }
    }
    if (!complete) {
      ++dropped;
      ++i;
      continue;
    }
    std::vector<double> row(24);
    for (int k = 0; k < 24; ++k)
      row[static_cast<std::size_t>(k)] = series.readings(i + k, pollutant);
    days.push_back(std::move(row));
    if (day_start_rows) day_start_rows->push_back(i);
    i += 24;
  }
  diag->trailing_dropped += dropped;
  if (dropped > 0)
    diag->note("station " + series.station_id + ": dropped " +
               std::to_string(dropped) + " readings outside complete days");
  if (days.empty())
    throw DataError("zero complete days for station " + series.station_id);

  grid.values.resize(static_cast<Eigen::Index>(days.size()), 24);
  for (std::size_t d2 = 0; d2 < days.size(); ++d2)
    for (int h2 = 0; h2 < 24; ++h2)
      grid.values(static_cast<Eigen::Index>(d2), h2) = days[d2][static_cast<std::size_t>(h2)];
  return grid;
}

}  // namespace drlssv
