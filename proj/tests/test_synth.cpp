#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "drlssv/hartley.hpp"
#include "drlssv/ingestion.hpp"
#include "drlssv/synth.hpp"

using namespace drlssv;

namespace {

const AqiBreakpoints& bp() {
  static AqiBreakpoints b = AqiBreakpoints::load_default();
  return b;
}

SynthSpec small_spec(std::uint64_t seed = 42) {
  SynthSpec s;
  s.n_stations = 2;
  s.days = 30;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("synthetic data has the requested shape") {
  SynthData d = generate_synth(small_spec(), bp());
  REQUIRE(d.hourly.size() == 2);
  REQUIRE(d.clean_hourly.size() == 2);
  REQUIRE(d.daily.size() == 2);
  for (const auto& s : d.hourly) {
    CHECK(s.size() == 30 * 24);
    CHECK(s.cadence == Cadence::Hourly);
    CHECK(s.readings.rows() == 30 * 24);
    CHECK(s.readings.cols() == kNumPollutants);
    CHECK(s.aqi.size() == s.size());
    CHECK(s.band.size() == s.size());
  }
  for (const auto& s : d.daily) {
    CHECK(s.size() == 30);
    CHECK(s.cadence == Cadence::Daily);
  }
  CHECK(d.hourly[0].station_id != d.hourly[1].station_id);
}

TEST_CASE("generation is deterministic in the seed") {
  SynthData a = generate_synth(small_spec(7), bp());
  SynthData b = generate_synth(small_spec(7), bp());
  SynthData c = generate_synth(small_spec(8), bp());
  CHECK(serialize_station_series(a.hourly[0]) ==
        serialize_station_series(b.hourly[0]));
  CHECK(serialize_station_series(a.daily[1]) ==
        serialize_station_series(b.daily[1]));
  CHECK(serialize_station_series(a.hourly[0]) !=
        serialize_station_series(c.hourly[0]));
}

TEST_CASE("stored truth matches the clean concentrations") {
  SynthData d = generate_synth(small_spec(), bp());
  const auto& clean = d.clean_hourly[0];
  for (std::size_t i = 0; i < clean.size(); i += 97) {
    AqiResult r = compute_aqi(
        clean.readings.row(static_cast<Eigen::Index>(i)).transpose(), bp());
    CHECK(clean.aqi[i] == doctest::Approx(r.aqi));
    REQUIRE(clean.band[i].has_value());
    CHECK(*clean.band[i] == r.band);
    // The noisy series carries the same truth labels.
    CHECK(d.hourly[0].aqi[i] == doctest::Approx(r.aqi));
  }
}

TEST_CASE("all readings are non-negative") {
  SynthData d = generate_synth(small_spec(3), bp());
  CHECK(d.hourly[0].readings.minCoeff() >= 0.0);
  CHECK(d.daily[0].readings.minCoeff() >= 0.0);
}

TEST_CASE("noise carries the requested share of column energy") {
  SynthSpec spec;
  spec.n_stations = 1;
  spec.days = 120;
  spec.noise_sd = 0.05;
  spec.spike_rate = 0.0;
  SynthData d = generate_synth(spec, bp());
  Eigen::MatrixXd diff = d.hourly[0].readings - d.clean_hourly[0].readings;
  for (int p = 0; p < kNumPollutants; ++p) {
    double ratio = diff.col(p).array().square().mean() /
                   d.clean_hourly[0].readings.col(p).array().square().mean();
    CHECK(ratio > 0.03);
    CHECK(ratio < 0.07);
  }
}

TEST_CASE("zero noise reproduces the clean series") {
  SynthSpec spec = small_spec();
  spec.noise_sd = 0.0;
  spec.spike_rate = 0.0;
  SynthData d = generate_synth(spec, bp());
  CHECK((d.hourly[0].readings - d.clean_hourly[0].readings)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("denoising strictly reduces the distance to the clean signal") {
  // Paired comparison over several seeds: for the driving pollutant,
  // spectral thresholding of the noisy grid must beat the identity.
  int wins = 0, total = 0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SynthSpec spec;
    spec.n_stations = 1;
    spec.days = 60;
    spec.seed = seed;
    SynthData d = generate_synth(spec, bp());
    for (int p : spec.planted) {
      Eigen::MatrixXd noisy(60, 24), clean(60, 24);
      for (int day = 0; day < 60; ++day)
        for (int h = 0; h < 24; ++h) {
          noisy(day, h) = d.hourly[0].readings(day * 24 + h, p);
          clean(day, h) = d.clean_hourly[0].readings(day * 24 + h, p);
        }
      Eigen::MatrixXd den = denoise(noisy, DenoiseConfig{0.95});
      double mse_raw = (noisy - clean).array().square().mean();
      double mse_den = (den - clean).array().square().mean();
      ++total;
      if (mse_den < mse_raw) ++wins;
    }
  }
  CHECK(wins == total);
}

TEST_CASE("invalid specs are rejected") {
  SynthSpec spec = small_spec();
  spec.n_stations = 0;
  CHECK_THROWS_AS(generate_synth(spec, bp()), ConfigError);
  spec = small_spec();
  spec.days = 0;
  CHECK_THROWS_AS(generate_synth(spec, bp()), ConfigError);
  spec = small_spec();
  spec.noise_sd = -0.1;
  CHECK_THROWS_AS(generate_synth(spec, bp()), ConfigError);
  spec = small_spec();
  spec.spike_rate = 1.5;
  CHECK_THROWS_AS(generate_synth(spec, bp()), ConfigError);
  spec = small_spec();
  spec.planted = {0, 1, 99};
  CHECK_THROWS_AS(generate_synth(spec, bp()), ConfigError);
}

TEST_CASE("written files parse back with every station") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "drlssv_synth_test";
  fs::remove_all(dir);
  SynthData d = generate_synth(small_spec(), bp());
  write_synth_files(d, dir.string());

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto hourly = parse_station_csv(slurp(dir / "hourly.csv"), Cadence::Hourly);
  auto daily = parse_station_csv(slurp(dir / "daily.csv"), Cadence::Daily);
  auto clean = parse_station_csv(slurp(dir / "clean.csv"), Cadence::Hourly);
  CHECK(hourly.size() == 2);
  CHECK(daily.size() == 2);
  CHECK(clean.size() == 2);
  CHECK(hourly[0].size() == 30 * 24);
  CHECK(daily[0].size() == 30);
  fs::remove_all(dir);
}
