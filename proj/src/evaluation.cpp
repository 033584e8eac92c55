#include "drlssv/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>

namespace drlssv {

std::set<AqiBand> default_positive_set() {
  return {AqiBand::Poor, AqiBand::VeryPoor, AqiBand::Severe};
}

double accuracy(const std::vector<AqiBand>& pred,
                const std::vector<AqiBand>& truth) {
  if (pred.size() != truth.size())
    throw DataError("accuracy: length mismatch");
  if (pred.empty()) throw DataError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double false_positive_rate(const std::vector<AqiBand>& pred,
                           const std::vector<AqiBand>& truth,
                           const std::set<AqiBand>& positive_set) {
  if (pred.size() != truth.size())
    throw DataError("false_positive_rate: length mismatch");
  if (positive_set.empty() || positive_set.size() >= kNumBands)
    throw DataError("false_positive_rate: positive set must be a non-empty "
                    "proper subset");
  std::size_t fp = 0, tn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = positive_set.count(pred[i]) > 0;
    const bool t = positive_set.count(truth[i]) > 0;
    if (!t) {
      if (p)
        ++fp;
      else
        ++tn;
    }
  }
  if (fp + tn == 0) return 0.0;
  return static_cast<double>(fp) / static_cast<double>(fp + tn);
}

double LssvPredictor::predict_aqi(const Eigen::VectorXd& x) const {
  return predict(model_, x);
}

RidgeBaseline::RidgeBaseline(const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, double lambda) {
  const Eigen::Index n = X.rows(), d = X.cols();
  if (n == 0) throw DataError("RidgeBaseline: empty training set");
  mean_ = X.colwise().mean();
  sd_.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double s = std::sqrt((X.col(j).array() - mean_[j]).square().sum() /
                         static_cast<double>(n));
    sd_[j] = s > 0 ? s : 1.0;
  }
  Eigen::MatrixXd Z = (X.rowwise() - mean_.transpose()).array().rowwise() /
                      sd_.transpose().array();
  intercept_ = y.mean();
  Eigen::MatrixXd A = Z.transpose() * Z +
                      lambda * Eigen::MatrixXd::Identity(d, d);
  weights_ = A.ldlt().solve(Z.transpose() * (y.array() - intercept_).matrix());
}

double RidgeBaseline::predict_aqi(const Eigen::VectorXd& x) const {
  Eigen::VectorXd z = (x - mean_).cwiseQuotient(sd_);
  return intercept_ + weights_.dot(z);
}

KnnBaseline::KnnBaseline(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         int k)
    : X_(X), y_(y), k_(k) {
  if (X.rows() == 0) throw DataError("KnnBaseline: empty training set");
  if (k < 1) throw ConfigError("KnnBaseline: k must be >= 1");
}

double KnnBaseline::predict_aqi(const Eigen::VectorXd& x) const {
  const Eigen::Index n = X_.rows();
  const int k = std::min<int>(k_, static_cast<int>(n));
  std::vector<std::pair<double, Eigen::Index>> d(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    d[static_cast<std::size_t>(i)] = {(X_.row(i).transpose() - x).squaredNorm(), i};
  std::partial_sort(d.begin(), d.begin() + k, d.end());
  double sum = 0;
  for (int i = 0; i < k; ++i) sum += y_[d[static_cast<std::size_t>(i)].second];
  return sum / k;
}

double measure_forecast_time_ms(const AqiPredictor& pred,
                                const Eigen::MatrixXd& X,
                                const AqiBreakpoints& bp) {
  using clock = std::chrono::steady_clock;
  volatile int sink = 0;  // keep the banding from being optimized out
  const auto t0 = clock::now();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double aqi = std::clamp(pred.predict_aqi(X.row(i).transpose()), 0.0, 500.0);
    sink = static_cast<int>(bp.band_of(aqi));
  }
  const auto t1 = clock::now();
  (void)sink;
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

EvalReport evaluate(const AqiPredictor& pred, const Eigen::MatrixXd& X_test,
                    const Eigen::VectorXd& aqi_test, const AqiBreakpoints& bp,
                    const std::set<AqiBand>& positive_set) {
  const Eigen::Index n = X_test.rows();
  if (n == 0) throw DataError("evaluate: empty test set");
  if (aqi_test.size() != n) throw DataError("evaluate: X/aqi size mismatch");

  EvalReport report;
  report.method_name = pred.name();
  report.n_samples = static_cast<std::size_t>(n);

  std::vector<AqiBand> pred_bands, true_bands;
  std::vector<double> pred_aqi(static_cast<std::size_t>(n));
  std::vector<double> true_aqi(static_cast<std::size_t>(n));
  double abs_err = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double a = std::clamp(pred.predict_aqi(X_test.row(i).transpose()), 0.0,
                          500.0);
    pred_aqi[static_cast<std::size_t>(i)] = a;
    true_aqi[static_cast<std::size_t>(i)] = aqi_test[i];
    pred_bands.push_back(bp.band_of(a));
    true_bands.push_back(bp.band_of(aqi_test[i]));
    abs_err += std::abs(a - aqi_test[i]);
  }
  report.mae_aqi = abs_err / static_cast<double>(n);

  for (std::size_t i = 0; i < pred_bands.size(); ++i)
    ++report.confusion[static_cast<std::size_t>(true_bands[i])]
                      [static_cast<std::size_t>(pred_bands[i])];
  report.accuracy = accuracy(pred_bands, true_bands);
  report.fpr = false_positive_rate(pred_bands, true_bands, positive_set);
  for (int b = 0; b < kNumBands; ++b)
    report.per_band_fpr[static_cast<std::size_t>(b)] = false_positive_rate(
        pred_bands, true_bands, {static_cast<AqiBand>(b)});

  report.forecast_time_ms = measure_forecast_time_ms(pred, X_test, bp);
  report.eq15_literal = static_cast<double>(n) * report.forecast_time_ms;

  if (n >= 2) {
    report.tau_verdict.tau = kendall_tau(pred_aqi, true_aqi);
    // All-tied sequences give tau = 0 with zero pair counts; flag them.
    bool pred_const = std::all_of(pred_aqi.begin(), pred_aqi.end(),
                                  [&](double v) { return v == pred_aqi[0]; });
    bool true_const = std::all_of(true_aqi.begin(), true_aqi.end(),
                                  [&](double v) { return v == true_aqi[0]; });
    report.tau_verdict.ties_degenerate = pred_const || true_const;
    report.tau_verdict.band = tau_band(report.tau_verdict.tau);
  } else {
    report.tau_verdict.ties_degenerate = true;
    report.tau_verdict.tau = 0;
    report.tau_verdict.band = tau_band(0);
  }
  return report;
}

static std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string SweepTable::to_csv() const {
  std::ostringstream out;
  out << "method,n,accuracy,fpr,forecast_time_ms,tau,tau_band\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.n << ',' << fmt(r.accuracy) << ','
        << fmt(r.fpr) << ',' << fmt(r.forecast_time_ms) << ',' << fmt(r.tau)
        << ',' << band_name(r.tau_band) << '\n';
  }
  return out.str();
}

std::string SweepTable::plot_data(const std::string& metric) const {
  std::vector<std::string> methods;
  std::vector<std::size_t> sizes;
  for (const auto& r : rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
    if (std::find(sizes.begin(), sizes.end(), r.n) == sizes.end())
      sizes.push_back(r.n);
  }
  auto value = [&](const SweepRow& r) {
    if (metric == "accuracy") return r.accuracy;
    if (metric == "fpr") return r.fpr;
    if (metric == "forecast_time_ms") return r.forecast_time_ms;
    if (metric == "tau") return r.tau;
    throw ConfigError("unknown plot metric: " + metric);
  };
  std::ostringstream out;
  out << "# n";
  for (const auto& m : methods) {
    std::string col = m;
    std::replace(col.begin(), col.end(), ' ', '_');
    out << ' ' << col;
  }
  out << '\n';
  for (std::size_t n : sizes) {
    out << n;
    for (const auto& m : methods) {
      for (const auto& r : rows)
        if (r.n == n && r.method == m) {
          out << ' ' << fmt(value(r));
          break;
        }
    }
    out << '\n';
  }
  return out.str();
}

SweepTable sweep_report(
    const std::vector<const AqiPredictor*>& methods,
    const Eigen::MatrixXd& X_test, const Eigen::VectorXd& aqi_test,
    const std::vector<std::size_t>& sizes, const AqiBreakpoints& bp,
    const std::set<AqiBand>& positive_set) {
  SweepTable table;
  for (std::size_t n : sizes)
    if (n > static_cast<std::size_t>(X_test.rows()))
      throw DataError("sweep size " + std::to_string(n) +
                      " exceeds available data (" +
                      std::to_string(X_test.rows()) + ")");
  for (std::size_t n : sizes) {
    const auto ni = static_cast<Eigen::Index>(n);
    for (const AqiPredictor* m : methods) {
      EvalReport r = evaluate(*m, X_test.topRows(ni), aqi_test.head(ni), bp,
                              positive_set);
      table.rows.push_back({r.method_name, r.n_samples, r.accuracy, r.fpr,
                            r.forecast_time_ms, r.tau_verdict.tau,
                            r.tau_verdict.band});
    }
  }
  return table;
}

}  // namespace drlssv
