#pragma once

#include <set>
#include <string>
#include <vector>

#include "drlssv/lssv.hpp"

namespace drlssv {

/// Default binary reduction of the six bands for the FPR: the three
/// "polluted" bands count as positive.
std::set<AqiBand> default_positive_set();

struct EvalReport {
  std::string method_name;
  std::size_t n_samples = 0;
  double accuracy = 0;            // band-level hit rate
  double forecast_time_ms = 0;    // prediction loop only
  double eq15_literal = 0;        // n_samples * forecast_time_ms
  double fpr = 0;                 // binary reduction FP/(FP+TN)
  double mae_aqi = 0;             // |predicted - observed| AQI, mean
  std::array<std::array<std::size_t, kNumBands>, kNumBands>
      confusion{};                // [true][pred]
  std::array<double, kNumBands> per_band_fpr{};  // one-vs-rest
  TauVerdict tau_verdict;
};

double accuracy(const std::vector<AqiBand>& pred,
                const std::vector<AqiBand>& truth);

double false_positive_rate(const std::vector<AqiBand>& pred,
                           const std::vector<AqiBand>& truth,
                           const std::set<AqiBand>& positive_set);

/// Regression interface shared by the LSSVM wrapper and the in-repo
/// baselines so the sweep can treat them uniformly.
class AqiPredictor {
 public:
  virtual ~AqiPredictor() = default;
  virtual double predict_aqi(const Eigen::VectorXd& x) const = 0;
  virtual std::string name() const = 0;
};

class LssvPredictor final : public AqiPredictor {
 public:
  explicit LssvPredictor(LssvModel model) : model_(std::move(model)) {}
  double predict_aqi(const Eigen::VectorXd& x) const override;
  std::string name() const override { return "DR-LSSV"; }
  const LssvModel& model() const { return model_; }

 private:
  LssvModel model_;
};

/// Ridge regression on the same selected features (substitute for the
/// out-of-scope deep comparators).
class RidgeBaseline final : public AqiPredictor {
 public:
  RidgeBaseline(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                double lambda = 1e-3);
  double predict_aqi(const Eigen::VectorXd& x) const override;
  std::string name() const override { return "Ridge (substitute)"; }

 private:
  Eigen::VectorXd weights_;
  double intercept_ = 0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd sd_;
};

/// k-nearest-neighbor regression, k = 5 (substitute baseline).
class KnnBaseline final : public AqiPredictor {
 public:
  KnnBaseline(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k = 5);
  double predict_aqi(const Eigen::VectorXd& x) const override;
  std::string name() const override { return "kNN (substitute)"; }

 private:
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  int k_;
};

/// Wall-clock of the predict-and-band loop only, monotone clock.
double measure_forecast_time_ms(const AqiPredictor& pred,
                                const Eigen::MatrixXd& X,
                                const AqiBreakpoints& bp);

/// Per-sample classification, confusion matrix, accuracy, FPR, timed
/// prediction loop, and the Kendall verdict between predicted and
/// observed AQI. Throws DataError on an empty test set.
EvalReport evaluate(const AqiPredictor& pred, const Eigen::MatrixXd& X_test,
                    const Eigen::VectorXd& aqi_test, const AqiBreakpoints& bp,
                    const std::set<AqiBand>& positive_set);

struct SweepRow {
  std::string method;
  std::size_t n = 0;
  double accuracy = 0;
  double fpr = 0;
  double forecast_time_ms = 0;
  double tau = 0;
  AqiBand tau_band = AqiBand::Good;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  std::string to_csv() const;
  /// One whitespace-separated file body per metric: column `n`, then
  /// one column per method.
  std::string plot_data(const std::string& metric) const;
};

/// Evaluates every (size, method) pair on prefixes of the test set.
/// Throws DataError naming the first size that exceeds the data.
SweepTable sweep_report(
    const std::vector<const AqiPredictor*>& methods,
    const Eigen::MatrixXd& X_test, const Eigen::VectorXd& aqi_test,
    const std::vector<std::size_t>& sizes, const AqiBreakpoints& bp,
    const std::set<AqiBand>& positive_set);

}  // namespace drlssv
