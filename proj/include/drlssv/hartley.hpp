#pragma once

#include "drlssv/types.hpp"

namespace drlssv {

/// P x Q real Hartley coefficients of a station grid.
struct HartleySpectrum {
  Eigen::MatrixXd coefficients;  // indexed (a, b)

  Eigen::Index rows() const { return coefficients.rows(); }
  Eigen::Index cols() const { return coefficients.cols(); }
};

struct DenoiseConfig {
  /// Fraction of total spectral energy retained, in (0, 1].
  double keep_fraction = 0.95;
};

/// H(a,b) = sum_{d,h} x(d,h) * cas(2*pi*(a*d/P + b*h/Q)),
/// cas(t) = cos(t) + sin(t), 0-based indices.
HartleySpectrum dht_forward(const Eigen::MatrixXd& grid);

/// x(d,h) = 1/(P*Q) * sum_{a,b} H(a,b) * cas(2*pi*(a*d/P + b*h/Q)).
/// The transform kernel is its own inverse up to this normalization.
Eigen::MatrixXd dht_inverse(const HartleySpectrum& spectrum);

/// Hard-thresholds the spectrum to the smallest set of coefficients
/// (by descending squared magnitude, ties broken by ascending (a,b))
/// whose cumulative energy reaches keep_fraction of the total, then
/// inverts. keep_fraction = 1 reproduces the input.
Eigen::MatrixXd denoise(const Eigen::MatrixXd& grid, const DenoiseConfig& cfg);

inline StationGrid denoise(const StationGrid& grid, const DenoiseConfig& cfg) {
  return {grid.station_id, grid.pollutant, denoise(grid.values, cfg)};
}

}  // namespace drlssv
