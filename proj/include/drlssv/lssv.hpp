#pragma once

#include <string>
#include <vector>

#include "drlssv/aqi.hpp"
#include "drlssv/types.hpp"

namespace drlssv {

enum class KernelKind { Linear, Rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  double sigma = 1.0;  // Rbf bandwidth, > 0
};

/// Trained least-squares SVM. The dual coefficients and bias solve the
/// saddle system [0 1'; 1 K + I/gamma] [B; dual] = [0; y]; on return
/// sum(dual) = 0 and the KKT residual are both below 1e-8.
struct LssvModel {
  Eigen::MatrixXd training_inputs;  // n x k
  Eigen::VectorXd dual;             // n
  double bias = 0;
  double gamma = 10.0;
  KernelSpec kernel;
};

/// Verdict from Kendall concordance between predicted and observed AQI.
struct TauVerdict {
  double tau = 0;
  AqiBand band = AqiBand::Good;
  bool ties_degenerate = false;  // every pair tied; tau reported as 0
};

/// K[i][j] = x_i . x_j (Linear) or exp(-|x_i - x_j|^2 / (2 sigma^2)).
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X, const KernelSpec& kernel);

/// Median pairwise Euclidean distance over the rows of X (strided
/// subsample above 500 rows, deterministic). Fallback 1.0 when all
/// distances vanish.
double median_pairwise_distance(const Eigen::MatrixXd& X);

LssvModel train_lssv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     double gamma, const KernelSpec& kernel);

double predict(const LssvModel& model, const Eigen::VectorXd& x);

/// Kendall's tau-a: (concordant - discordant) / (n(n-1)/2); pairs tied
/// in either vector count in neither tally. O(n log n) merge counting.
double kendall_tau(const std::vector<double>& u, const std::vector<double>& v);

/// Algorithm-3 verdict mapping on [-1, 1]:
///   [-1, -0.5] VeryPoor, 0 Good (within 1e-12), (-0.5, 0) Poor,
///   (0, 0.5] Satisfactory, (0.5, 1] Moderate, otherwise Severe.
AqiBand tau_band(double tau);

/// Clamped AQI prediction plus its CPCB band.
AqiResult classify_aqi(const LssvModel& model, const Eigen::VectorXd& x,
                       const AqiBreakpoints& bp);

/// Versioned text persistence (header "DRLSSV1", 17 significant digits).
std::string save_model(const LssvModel& model);
LssvModel load_model(const std::string& text);

}  // namespace drlssv
