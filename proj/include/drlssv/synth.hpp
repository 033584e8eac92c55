#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "drlssv/aqi.hpp"
#include "drlssv/types.hpp"

namespace drlssv {

/// Desk-scale synthetic stand-in for the India dataset. All randomness
/// flows from `seed` through one mt19937_64; identical specs produce
/// identical bytes.
///
/// Construction: each planted pollutant follows a smooth flat-topped
/// wave (grid-periodic, so it occupies a handful of Hartley modes)
/// whose levels sit at AQI band interiors, plus a diurnal cycle that
/// peaks in daytime. The true AQI is computed from these clean
/// concentrations; the emitted readings add Gaussian noise and sparse
/// positive spikes carrying noise_sd of the clean column energy.
/// Non-planted pollutants follow low-level slow waves. The companion
/// daily file reports daytime (08:00-19:00) means, which sit above the
/// all-day mean exactly for the pollutants with a diurnal cycle.
struct SynthSpec {
  int n_stations = 5;
  int days = 120;
  std::uint64_t seed = 42;
  std::array<int, 3> planted = {1, 5, 6};  // PM10, CO, O3
  double noise_sd = 0.05;   // noise-to-signal energy ratio per column
  double spike_rate = 0.01;  // per-cell probability of an impulse
};

struct SynthData {
  std::vector<StationSeries> hourly;        // noisy readings, truth AQI
  std::vector<StationSeries> clean_hourly;  // noise-free reference
  std::vector<StationSeries> daily;         // native daily file
};

SynthData generate_synth(const SynthSpec& spec, const AqiBreakpoints& bp);

/// Writes `<dir>/hourly.csv`, `<dir>/daily.csv`, `<dir>/clean.csv`.
void write_synth_files(const SynthData& data, const std::string& dir);

}  // namespace drlssv
