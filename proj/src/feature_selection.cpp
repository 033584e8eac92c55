#include "drlssv/feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>

namespace drlssv {

Eigen::MatrixXd HomogenizedSamples::standardized() const {
  Eigen::MatrixXd X = features;
  for (int j = 0; j < kNumPollutants; ++j)
    X.col(j) = (X.col(j).array() - feature_means[j]) / feature_sds[j];
  return X;
}

HomogenizedSamples homogenize(const Eigen::MatrixXd& hourly,
                              const Eigen::MatrixXd& daily) {
  if (hourly.rows() == 0) throw DataError("homogenize: empty hourly pool");
  if (daily.rows() == 0) throw DataError("homogenize: empty daily pool");
  if (hourly.cols() != kNumPollutants || daily.cols() != kNumPollutants)
    throw DataError("homogenize: feature vectors must have 7 columns");

  const Eigen::Index n0 = hourly.rows(), n1 = daily.rows();
  HomogenizedSamples out;
  out.features.resize(n0 + n1, kNumPollutants);
  out.features.topRows(n0) = hourly;
  out.features.bottomRows(n1) = daily;
  out.labels.setZero(n0 + n1);
  out.labels.tail(n1).setOnes();

  const double n = static_cast<double>(n0 + n1);
  for (int j = 0; j < kNumPollutants; ++j) {
    const double mean = out.features.col(j).mean();
    double var = (out.features.col(j).array() - mean).square().sum() / n;
    out.feature_means[j] = mean;
    double sd = std::sqrt(var);
    out.feature_sds[j] = sd > 0 ? sd : 1.0;
  }
  return out;
}

// log(1 + e^z) without overflow.
static double log1pexp(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double log_likelihood(double alpha, const Eigen::VectorXd& beta,
                      const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      double ridge) {
  if (X.rows() == 0) throw DataError("log_likelihood: no samples");
  const Eigen::VectorXd z = (X * beta).array() + alpha;
  double ll = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    ll += y[i] * z[i] - log1pexp(z[i]);
  return ll - 0.5 * ridge * beta.squaredNorm();
}

std::pair<double, Eigen::VectorXd> score(double alpha,
                                         const Eigen::VectorXd& beta,
                                         const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& y,
                                         double ridge) {
  if (X.rows() == 0) throw DataError("score: no samples");
  const Eigen::VectorXd z = (X * beta).array() + alpha;
  Eigen::VectorXd resid(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-z[i]));
    resid[i] = y[i] - p;
  }
  return {resid.sum(), X.transpose() * resid - ridge * beta};
}

LogisticModel fit_logistic(const HomogenizedSamples& samples,
                           const LogisticConfig& cfg) {
  const Eigen::Index n = samples.size();
  if (n < 2) throw DataError("fit_logistic: need at least 2 samples");
  const double pos = samples.labels.sum();
  if (pos == 0 || pos == static_cast<double>(n))
    throw DataError("fit_logistic: both labels must be present");

  const Eigen::MatrixXd X = samples.standardized();
  const Eigen::VectorXd& y = samples.labels;
  const int d = kNumPollutants;

  double alpha = 0;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  double ll = log_likelihood(alpha, beta, X, y, cfg.ridge);

  LogisticModel model;
  model.feature_means = samples.feature_means;
  model.feature_sds = samples.feature_sds;

  int iter = 0;
  for (; iter < cfg.max_iter; ++iter) {
    auto [ga, gb] = score(alpha, beta, X, y, cfg.ridge);
    const double gmax = std::max(std::abs(ga), gb.lpNorm<Eigen::Infinity>());
    if (gmax < cfg.tol) {
      model.converged = true;
      break;
    }

    // Negative Hessian of the penalized log-likelihood in (alpha, beta).
    const Eigen::VectorXd z = (X * beta).array() + alpha;
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = 1.0 / (1.0 + std::exp(-z[i]));
      w[i] = std::max(p * (1 - p), 1e-12);
    }
    Eigen::MatrixXd Hn(d + 1, d + 1);
    Hn(0, 0) = w.sum();
    Hn.block(0, 1, 1, d) = (w.transpose() * X);
    Hn.block(1, 0, d, 1) = Hn.block(0, 1, 1, d).transpose();
    Hn.block(1, 1, d, d) = X.transpose() * w.asDiagonal() * X +
                           cfg.ridge * Eigen::MatrixXd::Identity(d, d);

    Eigen::VectorXd g(d + 1);
    g[0] = ga;
    g.tail(d) = gb;
    Eigen::VectorXd step = Hn.ldlt().solve(g);

    // Step halving keeps the penalized likelihood non-decreasing.
    double t = 1.0;
    double new_ll = ll;
    double new_alpha = alpha;
    Eigen::VectorXd new_beta = beta;
    for (int half = 0; half < 40; ++half) {
      new_alpha = alpha + t * step[0];
      new_beta = beta + t * step.tail(d);
      new_ll = log_likelihood(new_alpha, new_beta, X, y, cfg.ridge);
      if (new_ll >= ll) break;
      t *= 0.5;
    }
    if (new_ll < ll) break;  // no ascent direction left
    alpha = new_alpha;
    beta = new_beta;
    ll = new_ll;
  }

  model.alpha = alpha;
  model.beta = beta;
  model.iterations = iter;
  if (!model.converged) {
    auto [ga, gb] = score(alpha, beta, X, y, cfg.ridge);
    model.converged =
        std::max(std::abs(ga), gb.lpNorm<Eigen::Infinity>()) < cfg.tol;
  }
  return model;
}

FeatureSelection select_features(const LogisticModel& model, int k) {
  if (!model.converged)
    throw DataError("select_features: model did not converge");
  if (k < 1 || k > kNumPollutants)
    throw DataError("select_features: k must be in [1, 7]");

  std::array<int, kNumPollutants> order;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(model.beta[a]) > std::abs(model.beta[b]);
  });

  FeatureSelection sel;
  for (int idx : order) {
    sel.ranked.emplace_back(kPollutantNames[idx]);
    sel.scores.push_back(std::abs(model.beta[idx]));
  }
  for (int i = 0; i < k; ++i) {
    sel.selected.push_back(sel.ranked[static_cast<std::size_t>(i)]);
    sel.selected_indices.push_back(order[static_cast<std::size_t>(i)]);
  }
  return sel;
}

std::string selection_to_csv(const FeatureSelection& sel) {
  std::ostringstream out;
  out << "rank,pollutant,score\n";
  for (std::size_t i = 0; i < sel.ranked.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", sel.scores[i]);
    out << (i + 1) << ',' << sel.ranked[i] << ',' << buf << '\n';
  }
  return out.str();
}

}  // namespace drlssv
