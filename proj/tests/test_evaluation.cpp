#include <cmath>
#include <random>

#include "doctest.h"
#include "drlssv/evaluation.hpp"

using namespace drlssv;

namespace {

const AqiBreakpoints& bp() {
  static AqiBreakpoints b = AqiBreakpoints::load_default();
  return b;
}

// Passes the first feature through as the AQI prediction.
class PassThrough final : public AqiPredictor {
 public:
  double predict_aqi(const Eigen::VectorXd& x) const override { return x[0]; }
  std::string name() const override { return "pass"; }
};

class Constant final : public AqiPredictor {
 public:
  explicit Constant(double v) : v_(v) {}
  double predict_aqi(const Eigen::VectorXd&) const override { return v_; }
  std::string name() const override { return "const"; }

 private:
  double v_;
};

}  // namespace

TEST_CASE("accuracy counts band hits") {
  std::vector<AqiBand> pred = {AqiBand::Good, AqiBand::Poor, AqiBand::Severe,
                               AqiBand::Good};
  std::vector<AqiBand> truth = {AqiBand::Good, AqiBand::Poor,
                                AqiBand::Moderate, AqiBand::Satisfactory};
  CHECK(accuracy(pred, truth) == doctest::Approx(0.5));
  CHECK_THROWS_AS(accuracy({}, {}), DataError);
}

TEST_CASE("false positive rate pinned example") {
  // One false positive against three true negatives: 1 / (1 + 3).
  std::vector<AqiBand> truth(4, AqiBand::Good);
  std::vector<AqiBand> pred = {AqiBand::Poor, AqiBand::Good, AqiBand::Good,
                               AqiBand::Good};
  CHECK(false_positive_rate(pred, truth, default_positive_set()) ==
        doctest::Approx(0.25));
}

TEST_CASE("false positive rate is zero when there are no negatives") {
  std::vector<AqiBand> truth(3, AqiBand::Severe);
  std::vector<AqiBand> pred = {AqiBand::Good, AqiBand::Poor, AqiBand::Severe};
  CHECK(false_positive_rate(pred, truth, default_positive_set()) ==
        doctest::Approx(0.0));
}

TEST_CASE("false positive rate rejects improper positive sets") {
  std::vector<AqiBand> v(2, AqiBand::Good);
  CHECK_THROWS_AS(false_positive_rate(v, v, {}), DataError);
  std::set<AqiBand> all;
  for (int b = 0; b < kNumBands; ++b) all.insert(static_cast<AqiBand>(b));
  CHECK_THROWS_AS(false_positive_rate(v, v, all), DataError);
}

TEST_CASE("perfect predictor evaluates perfectly") {
  Eigen::MatrixXd X(6, 1);
  X << 25, 75, 150, 250, 350, 450;
  Eigen::VectorXd aqi = X.col(0);
  EvalReport r = evaluate(PassThrough(), X, aqi, bp(), default_positive_set());
  CHECK(r.n_samples == 6);
  CHECK(r.accuracy == doctest::Approx(1.0));
  CHECK(r.fpr == doctest::Approx(0.0));
  CHECK(r.mae_aqi == doctest::Approx(0.0));
  CHECK(r.tau_verdict.tau == doctest::Approx(1.0));
  CHECK(r.tau_verdict.band == AqiBand::Moderate);
  CHECK(!r.tau_verdict.ties_degenerate);
  CHECK(r.eq15_literal ==
        doctest::Approx(6.0 * r.forecast_time_ms).epsilon(1e-12));
  for (int b = 0; b < kNumBands; ++b) {
    CHECK(r.confusion[std::size_t(b)][std::size_t(b)] == 1);
    CHECK(r.per_band_fpr[std::size_t(b)] == doctest::Approx(0.0));
  }
}

TEST_CASE("constant predictor is flagged tie-degenerate") {
  Eigen::MatrixXd X(4, 1);
  X << 25, 75, 150, 250;
  Eigen::VectorXd aqi = X.col(0);
  EvalReport r = evaluate(Constant(30.0), X, aqi, bp(),
                          default_positive_set());
  CHECK(r.tau_verdict.ties_degenerate);
  CHECK(r.tau_verdict.tau == doctest::Approx(0.0));
  CHECK(r.tau_verdict.band == AqiBand::Good);
  CHECK(r.accuracy == doctest::Approx(0.25));
  CHECK(r.fpr == doctest::Approx(0.0));
}

TEST_CASE("predictions are clamped before banding") {
  Eigen::MatrixXd X(2, 1);
  X << 10, 20;
  Eigen::VectorXd aqi(2);
  aqi << 500, 500;
  EvalReport r = evaluate(Constant(9999.0), X, aqi, bp(),
                          default_positive_set());
  CHECK(r.accuracy == doctest::Approx(1.0));  // clamped to 500 -> Severe
  CHECK(r.mae_aqi == doctest::Approx(0.0));
}

TEST_CASE("evaluate rejects empty input") {
  Eigen::MatrixXd X(0, 1);
  Eigen::VectorXd aqi(0);
  CHECK_THROWS_AS(
      evaluate(Constant(1.0), X, aqi, bp(), default_positive_set()),
      DataError);
}

TEST_CASE("ridge baseline recovers a linear map") {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd X(80, 2);
  Eigen::VectorXd y(80);
  for (Eigen::Index i = 0; i < 80; ++i) {
    X(i, 0) = 10.0 * g(rng);
    X(i, 1) = 10.0 * g(rng);
    y[i] = 3.0 * X(i, 0) - 2.0 * X(i, 1) + 50.0;
  }
  RidgeBaseline ridge(X, y);
  Eigen::VectorXd q(2);
  q << 4.0, -1.0;
  CHECK(std::abs(ridge.predict_aqi(q) - (3.0 * 4.0 + 2.0 + 50.0)) < 0.1);
}

TEST_CASE("knn baseline averages the nearest cluster") {
  Eigen::MatrixXd X(10, 1);
  Eigen::VectorXd y(10);
  for (int i = 0; i < 5; ++i) {
    X(i, 0) = 0.0 + 0.01 * i;
    y[i] = 10.0;
    X(5 + i, 0) = 100.0 + 0.01 * i;
    y[5 + i] = 200.0;
  }
  KnnBaseline knn(X, y);
  Eigen::VectorXd q(1);
  q << 0.02;
  CHECK(knn.predict_aqi(q) == doctest::Approx(10.0));
  q << 100.0;
  CHECK(knn.predict_aqi(q) == doctest::Approx(200.0));
}

TEST_CASE("forecast timing is positive and scales with n") {
  Eigen::MatrixXd X(100, 1);
  for (int i = 0; i < 100; ++i) X(i, 0) = i;
  CHECK(measure_forecast_time_ms(Constant(1.0), X, bp()) >= 0.0);
}

TEST_CASE("sweep table CSV and plot data") {
  Eigen::MatrixXd X(8, 1);
  X << 25, 75, 150, 250, 350, 450, 90, 180;
  Eigen::VectorXd aqi = X.col(0);
  PassThrough pass;
  Constant constant(40.0);
  SweepTable table =
      sweep_report({&pass, &constant}, X, aqi, {4, 8}, bp(),
                   default_positive_set());
  REQUIRE(table.rows.size() == 4);
  std::string csv = table.to_csv();
  CHECK(csv.rfind("method,n,accuracy,fpr,forecast_time_ms,tau,tau_band\n",
                  0) == 0);
  CHECK(csv.find("pass,4,1,") != std::string::npos);
  CHECK(csv.find("pass,8,1,") != std::string::npos);

  std::string plot = table.plot_data("accuracy");
  CHECK(plot.rfind("# n pass const\n", 0) == 0);
  CHECK(plot.find("\n4 1 ") != std::string::npos);
  CHECK_THROWS_AS(table.plot_data("nonsense"), ConfigError);
}

TEST_CASE("sweep rejects sizes beyond the data, naming the size") {
  Eigen::MatrixXd X(3, 1);
  X << 25, 75, 150;
  Eigen::VectorXd aqi = X.col(0);
  PassThrough pass;
  try {
    sweep_report({&pass}, X, aqi, {2, 9}, bp(), default_positive_set());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("9") != std::string::npos);
  }
}
