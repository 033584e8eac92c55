#include "drlssv/hartley.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace drlssv {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// cas(u + v) = cos(u)*cas(v) + sin(u)*cas(-v), so the double sum only
// needs cos/sin tables over a*d mod P and cas tables over b*h mod Q.
struct CasTables {
  std::vector<double> cos_p, sin_p;   // index (a*d) mod P
  std::vector<double> cas_q, ncas_q;  // cas and cas-of-negative, (b*h) mod Q

  CasTables(Eigen::Index P, Eigen::Index Q)
      : cos_p(static_cast<std::size_t>(P)),
        sin_p(static_cast<std::size_t>(P)),
        cas_q(static_cast<std::size_t>(Q)),
        ncas_q(static_cast<std::size_t>(Q)) {
    for (Eigen::Index r = 0; r < P; ++r) {
      double t = kTwoPi * static_cast<double>(r) / static_cast<double>(P);
      cos_p[static_cast<std::size_t>(r)] = std::cos(t);
      sin_p[static_cast<std::size_t>(r)] = std::sin(t);
    }
    for (Eigen::Index r = 0; r < Q; ++r) {
      double t = kTwoPi * static_cast<double>(r) / static_cast<double>(Q);
      cas_q[static_cast<std::size_t>(r)] = std::cos(t) + std::sin(t);
      ncas_q[static_cast<std::size_t>(r)] = std::cos(t) - std::sin(t);
    }
  }
};

Eigen::MatrixXd transform(const Eigen::MatrixXd& in, double scale) {
  const Eigen::Index P = in.rows(), Q = in.cols();
  CasTables tab(P, Q);
  Eigen::MatrixXd out(P, Q);
  for (Eigen::Index a = 0; a < P; ++a) {
    for (Eigen::Index b = 0; b < Q; ++b) {
      double acc = 0;
      for (Eigen::Index d = 0; d < P; ++d) {
        const std::size_t rp = static_cast<std::size_t>((a * d) % P);
        double even = 0, odd = 0;
        for (Eigen::Index h = 0; h < Q; ++h) {
          const std::size_t rq = static_cast<std::size_t>((b * h) % Q);
          even += in(d, h) * tab.cas_q[rq];
          odd += in(d, h) * tab.ncas_q[rq];
        }
        acc += tab.cos_p[rp] * even + tab.sin_p[rp] * odd;
      }
      out(a, b) = scale * acc;
    }
  }
  return out;
}

}  // namespace

HartleySpectrum dht_forward(const Eigen::MatrixXd& grid) {
  if (grid.size() == 0) throw DataError("dht_forward: empty grid");
  return {transform(grid, 1.0)};
}

Eigen::MatrixXd dht_inverse(const HartleySpectrum& spectrum) {
  if (spectrum.coefficients.size() == 0)
    throw DataError("dht_inverse: empty spectrum");
  const double n = static_cast<double>(spectrum.coefficients.size());
  return transform(spectrum.coefficients, 1.0 / n);
}

Eigen::MatrixXd denoise(const Eigen::MatrixXd& grid, const DenoiseConfig& cfg) {
  if (!(cfg.keep_fraction > 0.0) || cfg.keep_fraction > 1.0)
    throw ConfigError("keep_fraction must be in (0, 1]");
  HartleySpectrum spec = dht_forward(grid);
  auto& H = spec.coefficients;
  const Eigen::Index P = H.rows(), Q = H.cols();

  struct Entry {
    double energy;
    Eigen::Index a, b;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(P * Q));
  double total = 0;
  for (Eigen::Index a = 0; a < P; ++a)
    for (Eigen::Index b = 0; b < Q; ++b) {
      double e = H(a, b) * H(a, b);
      entries.push_back({e, a, b});
      total += e;
    }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.energy != y.energy) return x.energy > y.energy;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });

  if (total > 0) {
    double cum = 0;
    std::size_t keep = entries.size();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      cum += entries[i].energy;
      if (cum >= cfg.keep_fraction * total) {
        keep = i + 1;
        break;
      }
    }
    for (std::size_t i = keep; i < entries.size(); ++i)
      H(entries[i].a, entries[i].b) = 0;
  }
  return dht_inverse(spec);
}

}  // namespace drlssv
