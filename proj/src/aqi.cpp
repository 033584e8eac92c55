#include "drlssv/aqi.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "csv.hpp"

namespace drlssv {

int pollutant_index(const std::string& name) {
  for (int i = 0; i < kNumPollutants; ++i)
    if (name == kPollutantNames[i]) return i;
  return -1;
}

const char* band_name(AqiBand b) {
  switch (b) {
    case AqiBand::Good: return "Good";
    case AqiBand::Satisfactory: return "Satisfactory";
    case AqiBand::Moderate: return "Moderate";
    case AqiBand::Poor: return "Poor";
    case AqiBand::VeryPoor: return "VeryPoor";
    case AqiBand::Severe: return "Severe";
  }
  return "?";
}

std::optional<AqiBand> band_from_name(const std::string& name) {
  for (int i = 0; i < kNumBands; ++i) {
    if (name == band_name(static_cast<AqiBand>(i)))
      return static_cast<AqiBand>(i);
  }
  // Common spellings used by the public India dataset.
  if (name == "Very Poor") return AqiBand::VeryPoor;
  return std::nullopt;
}

std::string default_data_dir() {
  if (const char* env = std::getenv("DRLSSV_DATA")) return env;
#ifdef DRLSSV_DATA_DIR
  return DRLSSV_DATA_DIR;
#else
  return "data";
#endif
}

static std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

AqiBreakpoints AqiBreakpoints::load(const std::string& breakpoints_csv_path,
                                    const std::string& bands_csv_path) {
  AqiBreakpoints bp;
  {
    auto lines = csv::split_lines(read_file(breakpoints_csv_path));
    if (lines.empty()) throw ConfigError("empty breakpoints file");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      auto f = csv::split_line(lines[i]);
      if (f.size() != 5)
        throw ConfigError("breakpoints row " + std::to_string(i + 1) +
                          ": expected 5 fields");
      int p = pollutant_index(f[0]);
      if (p < 0) throw ConfigError("unknown pollutant: " + f[0]);
      AqiSegment seg;
      auto cl = csv::parse_double(f[1]), ch = csv::parse_double(f[2]);
      auto il = csv::parse_double(f[3]), ih = csv::parse_double(f[4]);
      if (!cl || !ch || !il || !ih)
        throw ConfigError("breakpoints row " + std::to_string(i + 1) +
                          ": bad number");
      seg = {*cl, *ch, *il, *ih};
      bp.segments[p].push_back(seg);
    }
  }
  {
    auto lines = csv::split_lines(read_file(bands_csv_path));
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      auto f = csv::split_line(lines[i]);
      if (f.size() != 3)
        throw ConfigError("band table row " + std::to_string(i + 1) +
                          ": expected 3 fields");
      auto lo = csv::parse_double(f[0]), hi = csv::parse_double(f[1]);
      auto band = band_from_name(f[2]);
      if (!lo || !hi || !band)
        throw ConfigError("band table row " + std::to_string(i + 1) +
                          ": bad value");
      bp.bands.push_back({*lo, *hi, *band});
    }
  }
  bp.validate();
  return bp;
}

AqiBreakpoints AqiBreakpoints::load_default() {
  const std::string dir = default_data_dir();
  return load(dir + "/cpcb_breakpoints.csv", dir + "/aqi_bands.csv");
}

void AqiBreakpoints::validate() const {
  for (int p = 0; p < kNumPollutants; ++p) {
    const auto& segs = segments[p];
    if (segs.empty())
      throw ConfigError(std::string("no segments for pollutant ") +
                        kPollutantNames[p]);
    if (segs.front().conc_low != 0 || segs.front().index_low != 0)
      throw ConfigError(std::string("segments must start at 0 for ") +
                        kPollutantNames[p]);
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (segs[i].conc_high <= segs[i].conc_low ||
          segs[i].index_high <= segs[i].index_low)
        throw ConfigError(std::string("degenerate segment for ") +
                          kPollutantNames[p]);
      if (i > 0 && (segs[i].conc_low != segs[i - 1].conc_high ||
                    segs[i].index_low != segs[i - 1].index_high))
        throw ConfigError(std::string("non-contiguous segments for ") +
                          kPollutantNames[p]);
    }
    if (segs.back().index_high != 500)
      throw ConfigError(std::string("index range must reach 500 for ") +
                        kPollutantNames[p]);
  }
  if (bands.size() != kNumBands)
    throw ConfigError("band table must have exactly six bands");
  if (bands.front().aqi_low != 0 || bands.back().aqi_high != 500)
    throw ConfigError("band table must cover [0, 500]");
  for (std::size_t i = 1; i < bands.size(); ++i)
    if (bands[i].aqi_low != bands[i - 1].aqi_high)
      throw ConfigError("band table must be contiguous");
}

double AqiBreakpoints::sub_index(int pollutant, double concentration) const {
  if (concentration < 0)
    throw DataError(std::string("negative concentration for ") +
                    kPollutantNames[pollutant]);
  const auto& segs = segments[pollutant];
  if (concentration >= segs.back().conc_high) return 500.0;
  // Upper edges inclusive, so a knot maps exactly onto its index_high.
  for (const auto& s : segs) {
    if (concentration <= s.conc_high) {
      double t = (concentration - s.conc_low) / (s.conc_high - s.conc_low);
      return s.index_low + t * (s.index_high - s.index_low);
    }
  }
  return 500.0;
}

AqiBand AqiBreakpoints::band_of(double aqi) const {
  for (const auto& b : bands)
    if (aqi <= b.aqi_high) return b.band;
  return bands.back().band;
}

AqiResult compute_aqi(const Eigen::Matrix<double, kNumPollutants, 1>& conc,
                      const AqiBreakpoints& bp) {
  double aqi = 0;
  for (int p = 0; p < kNumPollutants; ++p)
    aqi = std::max(aqi, bp.sub_index(p, conc[p]));
  aqi = std::clamp(aqi, 0.0, 500.0);
  return {aqi, bp.band_of(aqi)};
}

}  // namespace drlssv
