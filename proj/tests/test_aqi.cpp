#include <cmath>
#include <random>

#include "doctest.h"
#include "drlssv/aqi.hpp"

using namespace drlssv;

namespace {
const AqiBreakpoints& bp() {
  static AqiBreakpoints b = AqiBreakpoints::load_default();
  return b;
}

Eigen::Matrix<double, kNumPollutants, 1> zero_conc() {
  return Eigen::Matrix<double, kNumPollutants, 1>::Zero();
}
}  // namespace

TEST_CASE("fixture tables validate") {
  CHECK_NOTHROW(bp().validate());
  for (int p = 0; p < kNumPollutants; ++p)
    CHECK(!bp().segments[static_cast<std::size_t>(p)].empty());
  CHECK(bp().bands.size() == kNumBands);
}

TEST_CASE("sub-index hits the knots exactly") {
  // At every segment endpoint the piecewise-linear map must return the
  // endpoint index; interior points must interpolate linearly.
  for (int p = 0; p < kNumPollutants; ++p) {
    for (const auto& s : bp().segments[static_cast<std::size_t>(p)]) {
      CHECK(bp().sub_index(p, s.conc_low) ==
            doctest::Approx(s.index_low).epsilon(1e-12));
      CHECK(bp().sub_index(p, s.conc_high) ==
            doctest::Approx(s.index_high).epsilon(1e-12));
      double mid_c = 0.5 * (s.conc_low + s.conc_high);
      double t = (mid_c - s.conc_low) / (s.conc_high - s.conc_low);
      double oracle = s.index_low + t * (s.index_high - s.index_low);
      CHECK(bp().sub_index(p, mid_c) == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
}

TEST_CASE("sub-index saturates at 500") {
  for (int p = 0; p < kNumPollutants; ++p) {
    double top = bp().segments[static_cast<std::size_t>(p)].back().conc_high;
    CHECK(bp().sub_index(p, top * 10) == doctest::Approx(500.0));
  }
}

TEST_CASE("sub-index is non-decreasing in concentration") {
  std::mt19937_64 rng(5);
  for (int p = 0; p < kNumPollutants; ++p) {
    double top = bp().segments[static_cast<std::size_t>(p)].back().conc_high;
    std::uniform_real_distribution<double> u(0.0, 1.5 * top);
    for (int it = 0; it < 200; ++it) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      CHECK(bp().sub_index(p, a) <= bp().sub_index(p, b) + 1e-12);
    }
  }
}

TEST_CASE("AQI is the max sub-index") {
  std::mt19937_64 rng(9);
  for (int it = 0; it < 100; ++it) {
    Eigen::Matrix<double, kNumPollutants, 1> conc;
    for (int p = 0; p < kNumPollutants; ++p) {
      double top = bp().segments[static_cast<std::size_t>(p)].back().conc_high;
      conc[p] = std::uniform_real_distribution<double>(0.0, top)(rng);
    }
    double oracle = 0;
    for (int p = 0; p < kNumPollutants; ++p)
      oracle = std::max(oracle, bp().sub_index(p, conc[p]));
    AqiResult r = compute_aqi(conc, bp());
    CHECK(r.aqi == doctest::Approx(std::clamp(oracle, 0.0, 500.0)));
    CHECK(r.band == bp().band_of(r.aqi));
  }
}

TEST_CASE("band edges are inclusive upward") {
  CHECK(bp().band_of(0.0) == AqiBand::Good);
  CHECK(bp().band_of(45.0) == AqiBand::Good);
  CHECK(bp().band_of(50.0) == AqiBand::Good);
  CHECK(bp().band_of(100.0) == AqiBand::Satisfactory);
  CHECK(bp().band_of(100.0000001) == AqiBand::Moderate);
  CHECK(bp().band_of(200.0) == AqiBand::Moderate);
  CHECK(bp().band_of(201.0) == AqiBand::Poor);
  CHECK(bp().band_of(300.0) == AqiBand::Poor);
  CHECK(bp().band_of(400.0) == AqiBand::VeryPoor);
  CHECK(bp().band_of(450.0) == AqiBand::Severe);
  CHECK(bp().band_of(500.0) == AqiBand::Severe);
}

TEST_CASE("zero concentrations give AQI 0 Good") {
  AqiResult r = compute_aqi(zero_conc(), bp());
  CHECK(r.aqi == doctest::Approx(0.0));
  CHECK(r.band == AqiBand::Good);
}

TEST_CASE("negative concentration is rejected") {
  auto conc = zero_conc();
  conc[3] = -1.0;
  CHECK_THROWS_AS(compute_aqi(conc, bp()), DataError);
}

TEST_CASE("extreme concentrations saturate at 500 Severe") {
  Eigen::Matrix<double, kNumPollutants, 1> conc;
  conc.setConstant(1e6);
  AqiResult r = compute_aqi(conc, bp());
  CHECK(r.aqi == doctest::Approx(500.0));
  CHECK(r.band == AqiBand::Severe);
}

TEST_CASE("band names round-trip") {
  for (int i = 0; i < kNumBands; ++i) {
    auto b = static_cast<AqiBand>(i);
    auto back = band_from_name(band_name(b));
    REQUIRE(back.has_value());
    CHECK(*back == b);
  }
  CHECK(!band_from_name("Apocalyptic").has_value());
}
