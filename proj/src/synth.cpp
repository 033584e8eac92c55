#include "drlssv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "drlssv/ingestion.hpp"

namespace drlssv {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Concentration whose sub-index equals `index` (inverse of the
/// piecewise-linear breakpoint map).
double concentration_for_index(const AqiBreakpoints& bp, int pollutant,
                               double index) {
  const auto& segs = bp.segments[static_cast<std::size_t>(pollutant)];
  for (const auto& s : segs) {
    if (index <= s.index_high) {
      double t = (index - s.index_low) / (s.index_high - s.index_low);
      return s.conc_low + t * (s.conc_high - s.conc_low);
    }
  }
  return segs.back().conc_high;
}

// Smooth flat-topped wave in [-1, 1]; grid-periodic in d with integer
// cycle count so its energy stays in a few Hartley modes.
double flat_top(double cycles_pos, double sharpness) {
  return std::tanh(sharpness * std::sin(kTwoPi * cycles_pos)) /
         std::tanh(sharpness);
}

struct PlantedParams {
  int k1, k2;          // day-wave cycle counts over the window
  double phi1, phi2;   // phases (cycles)
  double base;         // mid level, index units
  double wave_amp;     // per-component flat-top amplitude, index units
  double hour_amp;     // diurnal amplitude, index units
  double hour_phase;   // cycles
};

}  // namespace

SynthData generate_synth(const SynthSpec& spec, const AqiBreakpoints& bp) {
  if (spec.n_stations < 1 || spec.days < 1)
    throw ConfigError("synth: n_stations and days must be positive");
  for (int p : spec.planted)
    if (p < 0 || p >= kNumPollutants)
      throw ConfigError("synth: planted pollutant index out of range");
  if (spec.noise_sd < 0 || spec.spike_rate < 0 || spec.spike_rate > 1)
    throw ConfigError("synth: noise_sd/spike_rate out of range");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int P = spec.days;
  const int hours = P * 24;
  const std::int64_t t0 = timestamp_from_civil(2020, 1, 1);

  SynthData out;
  for (int s = 0; s < spec.n_stations; ++s) {
    // Planted-pollutant waves: two flat-topped day components of equal
    // amplitude give each pollutant three levels, all at band
    // interiors. The first planted pollutant drives the AQI (levels
    // 131 / 245 / 359 in Moderate / Poor / VeryPoor); the other two
    // move independently at low levels (30 / 90 / 150) with stronger
    // diurnal cycles, so every planted pollutant carries its own
    // daytime signal.
    std::array<PlantedParams, 3> pp;
    for (std::size_t r = 0; r < pp.size(); ++r) {
      auto& q = pp[r];
      q.k1 = 2 + static_cast<int>(unit(rng) * 3);  // 2..4 cycles
      q.k2 = q.k1 + 1 + static_cast<int>(unit(rng) * 3);
      q.phi1 = unit(rng);
      q.phi2 = unit(rng);
      if (r == 0) {
        q.base = 245.0;
        q.wave_amp = 57.0;
        q.hour_amp = 22.0 + 6.0 * unit(rng);
      } else {
        q.base = 90.0;
        q.wave_amp = 30.0;
        q.hour_amp = 20.0 + 8.0 * unit(rng);
      }
      q.hour_phase = 0.04 * (unit(rng) - 0.5);
    }
    // Idle pollutants follow a slow grid-periodic cas wave that is
    // constant within each day: the daytime mean equals the all-day
    // mean, and the wave occupies a single Hartley mode, so spectral
    // thresholding treats the hourly and daily grids identically.
    std::array<double, kNumPollutants> idle_base, idle_amp;
    std::array<int, kNumPollutants> idle_cycles;
    for (int p = 0; p < kNumPollutants; ++p) {
      idle_base[static_cast<std::size_t>(p)] = 15.0 + 15.0 * unit(rng);
      idle_amp[static_cast<std::size_t>(p)] =
          0.25 * idle_base[static_cast<std::size_t>(p)] * (0.8 + 0.4 * unit(rng));
      idle_cycles[static_cast<std::size_t>(p)] =
          2 + static_cast<int>(unit(rng) * 4);  // 2..5 cycles
    }

    // Clean index-space signal per pollutant per cell.
    Eigen::MatrixXd clean(hours, kNumPollutants);
    for (int p = 0; p < kNumPollutants; ++p) {
      int rank = -1;
      for (int r = 0; r < 3; ++r)
        if (spec.planted[static_cast<std::size_t>(r)] == p) rank = r;
      for (int d = 0; d < P; ++d) {
        for (int h = 0; h < 24; ++h) {
          const int row = d * 24 + h;
          double idx;
          if (rank >= 0) {
            const auto& q = pp[static_cast<std::size_t>(rank)];
            double day_pos = static_cast<double>(d) / P;
            idx = q.base +
                  q.wave_amp * flat_top(q.k1 * day_pos + q.phi1, 6.0) +
                  q.wave_amp * flat_top(q.k2 * day_pos + q.phi2, 6.0) +
                  q.hour_amp *
                      std::sin(kTwoPi * (h / 24.0 + q.hour_phase - 0.375));
          } else {
            const auto u = static_cast<std::size_t>(p);
            const double theta = kTwoPi * idle_cycles[u] *
                                 (static_cast<double>(d) / P);
            idx = idle_base[u] + idle_amp[u] * 0.7071067811865476 *
                                     (std::cos(theta) + std::sin(theta));
          }
          clean(row, p) =
              concentration_for_index(bp, p, std::clamp(idx, 1.0, 480.0));
        }
      }
    }

    // noise_sd is the target noise-to-signal energy ratio per column:
    // Gaussian noise plus sparse impulses together carry noise_sd times
    // the clean column energy. The impulse amplitude is 2 sigma times
    // (0.5 + u), so impulses contribute 4.33 sigma^2 per occurrence.
    std::array<double, kNumPollutants> noise_scale;
    for (int p = 0; p < kNumPollutants; ++p) {
      const double mean_sq = clean.col(p).array().square().mean();
      const double var = spec.noise_sd * mean_sq /
                         (1.0 + 4.333 * spec.spike_rate);
      noise_scale[static_cast<std::size_t>(p)] = std::sqrt(var);
    }

    Eigen::MatrixXd noisy = clean;
    for (int row = 0; row < hours; ++row) {
      for (int p = 0; p < kNumPollutants; ++p) {
        double sd = noise_scale[static_cast<std::size_t>(p)];
        double v = noisy(row, p) + sd * gauss(rng);
        if (unit(rng) < spec.spike_rate)
          v += 2.0 * sd * (0.5 + unit(rng));  // positive impulse
        noisy(row, p) = std::max(v, 0.0);
      }
    }

    char sid[16];
    std::snprintf(sid, sizeof(sid), "SYN%03d", s + 1);

    auto make_hourly = [&](const Eigen::MatrixXd& values) {
      StationSeries ser;
      ser.station_id = sid;
      ser.cadence = Cadence::Hourly;
      ser.readings = values;
      for (int row = 0; row < hours; ++row) {
        ser.timestamps.push_back(t0 + static_cast<std::int64_t>(row) * 3600);
        AqiResult truth = compute_aqi(clean.row(row).transpose(), bp);
        ser.aqi.push_back(truth.aqi);
        ser.band.push_back(truth.band);
      }
      return ser;
    };
    out.hourly.push_back(make_hourly(noisy));
    out.clean_hourly.push_back(make_hourly(clean));

    // Native daily file: daytime means of the noisy readings, plus the
    // instrument noise of the daily reporting chain. Its variance tops
    // the averaged-down hourly noise back up to the hourly per-value
    // level, so both cadences present the same noise-to-signal ratio;
    // it is mean-centered per column so the reporting chain adds no
    // station-level bias.
    Eigen::MatrixXd daily_noise(P, kNumPollutants);
    for (int d = 0; d < P; ++d)
      for (int p = 0; p < kNumPollutants; ++p)
        daily_noise(d, p) = noise_scale[static_cast<std::size_t>(p)] *
                            std::sqrt(11.0 / 12.0) * gauss(rng);
    daily_noise.rowwise() -= daily_noise.colwise().mean();

    StationSeries day;
    day.station_id = sid;
    day.cadence = Cadence::Daily;
    day.readings.resize(P, kNumPollutants);
    for (int d = 0; d < P; ++d) {
      day.timestamps.push_back(t0 + static_cast<std::int64_t>(d) * 86400);
      Eigen::Matrix<double, kNumPollutants, 1> conc;
      for (int p = 0; p < kNumPollutants; ++p) {
        double sum = 0;
        for (int h = 8; h <= 19; ++h) sum += noisy(d * 24 + h, p);
        conc[p] = std::max(sum / 12.0 + daily_noise(d, p), 0.0);
      }
      day.readings.row(d) = conc.transpose();
      AqiResult r = compute_aqi(conc, bp);
      day.aqi.push_back(r.aqi);
      day.band.push_back(r.band);
    }
    out.daily.push_back(std::move(day));
  }
  return out;
}

static void write_series_file(const std::vector<StationSeries>& series,
                              const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::string text = serialize_station_series(series[i]);
    if (i > 0) {
      // Drop the header of subsequent stations.
      text.erase(0, text.find('\n') + 1);
    }
    f << text;
  }
}

void write_synth_files(const SynthData& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_series_file(data.hourly, dir + "/hourly.csv");
  write_series_file(data.daily, dir + "/daily.csv");
  write_series_file(data.clean_hourly, dir + "/clean.csv");
}

}  // namespace drlssv
