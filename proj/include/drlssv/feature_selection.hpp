#pragma once

#include <string>
#include <vector>

#include "drlssv/types.hpp"

namespace drlssv {

/// Pooled hourly/daily feature rows labeled by pool of origin
/// (0 = hourly pool, 1 = daily pool), with the standardization
/// statistics computed over the union.
struct HomogenizedSamples {
  Eigen::MatrixXd features;  // n x 7, raw units
  Eigen::VectorXd labels;    // n, entries in {0, 1}
  Eigen::Matrix<double, kNumPollutants, 1> feature_means;
  Eigen::Matrix<double, kNumPollutants, 1> feature_sds;  // all > 0

  Eigen::Index size() const { return features.rows(); }
  /// (raw - mean) / sd, column-wise.
  Eigen::MatrixXd standardized() const;
};

struct LogisticConfig {
  int max_iter = 100;
  double tol = 1e-8;    // max-norm of the score at convergence
  double ridge = 1e-4;  // penalty on beta only, keeps the MLE finite
};

struct LogisticModel {
  double alpha = 0;
  Eigen::Matrix<double, kNumPollutants, 1> beta;  // standardized units
  int iterations = 0;
  bool converged = false;
  Eigen::Matrix<double, kNumPollutants, 1> feature_means;
  Eigen::Matrix<double, kNumPollutants, 1> feature_sds;
};

struct FeatureSelection {
  std::vector<std::string> ranked;    // all 7, by descending score
  std::vector<std::string> selected;  // first k of ranked
  std::vector<double> scores;         // |standardized beta|, non-increasing
  std::vector<int> selected_indices;  // canonical pollutant indices
};

/// Concatenates the two pools; throws DataError when either is empty.
/// Constant columns get sd = 1 so standardization stays defined.
HomogenizedSamples homogenize(const Eigen::MatrixXd& hourly,
                              const Eigen::MatrixXd& daily);

/// Ridge-penalized Bernoulli log-likelihood over standardized features,
/// computed with overflow-safe formulations.
double log_likelihood(double alpha, const Eigen::VectorXd& beta,
                      const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      double ridge);

/// Gradient of log_likelihood in (alpha, beta).
std::pair<double, Eigen::VectorXd> score(double alpha,
                                         const Eigen::VectorXd& beta,
                                         const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& y,
                                         double ridge);

/// Newton's method with step halving from (0, 0) on the standardized
/// samples. Throws DataError when only one label is present.
LogisticModel fit_logistic(const HomogenizedSamples& samples,
                           const LogisticConfig& cfg = {});

/// Ranks pollutants by |beta_j| in standardized units (equivalently
/// |beta_raw_j * sd_j|), ties broken by canonical pollutant order.
/// Throws DataError for a non-converged model or k outside [1, 7].
FeatureSelection select_features(const LogisticModel& model, int k = 3);

std::string selection_to_csv(const FeatureSelection& sel);

}  // namespace drlssv
