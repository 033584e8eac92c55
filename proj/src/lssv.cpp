#include "drlssv/lssv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace drlssv {

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X,
                            const KernelSpec& kernel) {
  const Eigen::Index n = X.rows();
  if (n < 1) throw DataError("gram_matrix: empty input");
  if (kernel.kind == KernelKind::Rbf && !(kernel.sigma > 0))
    throw ConfigError("gram_matrix: Rbf sigma must be positive");

  Eigen::MatrixXd K(n, n);
  if (kernel.kind == KernelKind::Linear) {
    K.noalias() = X * X.transpose();
  } else {
    const double inv = 1.0 / (2.0 * kernel.sigma * kernel.sigma);
    for (Eigen::Index i = 0; i < n; ++i) {
      K(i, i) = 1.0;
      for (Eigen::Index j = 0; j < i; ++j) {
        const double d2 = (X.row(i) - X.row(j)).squaredNorm();
        K(i, j) = K(j, i) = std::exp(-d2 * inv);
      }
    }
  }
  return K;
}

double median_pairwise_distance(const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  if (n < 2) return 1.0;
  // Strided subsample keeps this O(1) in n without any RNG.
  const Eigen::Index cap = 500;
  const Eigen::Index stride = n > cap ? (n + cap - 1) / cap : 1;
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < n; i += stride) idx.push_back(i);

  std::vector<double> dists;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      dists.push_back((X.row(idx[i]) - X.row(idx[j])).norm());
  if (dists.empty()) return 1.0;
  std::nth_element(dists.begin(), dists.begin() + dists.size() / 2,
                   dists.end());
  double med = dists[dists.size() / 2];
  return med > 0 ? med : 1.0;
}

LssvModel train_lssv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     double gamma, const KernelSpec& kernel) {
  const Eigen::Index n = X.rows();
  if (n < 1) throw DataError("train_lssv: empty training set");
  if (y.size() != n) throw DataError("train_lssv: X/y size mismatch");
  if (!(gamma > 0)) throw ConfigError("train_lssv: gamma must be positive");

  // Partitioned solve of the saddle system: with Kt = K + I/gamma,
  //   nu = Kt^-1 1, mu = Kt^-1 y, B = (1' mu)/(1' nu), dual = mu - B nu.
  Eigen::MatrixXd Kt = gram_matrix(X, kernel);
  Kt.diagonal().array() += 1.0 / gamma;

  Eigen::LLT<Eigen::MatrixXd> llt(Kt);
  if (llt.info() != Eigen::Success) {
    // K + I/gamma is positive definite in exact arithmetic; report the
    // conditioning when the factorization still fails.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kt);
    std::ostringstream msg;
    msg << "train_lssv: singular saddle system (eigenvalue range ["
        << es.eigenvalues().minCoeff() << ", " << es.eigenvalues().maxCoeff()
        << "])";
    throw DataError(msg.str());
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd nu = llt.solve(ones);
  const Eigen::VectorXd mu = llt.solve(y);
  const double s = ones.dot(nu);
  if (!(std::abs(s) > 1e-300))
    throw DataError("train_lssv: degenerate system, 1' Kt^-1 1 = 0");

  LssvModel model;
  model.training_inputs = X;
  model.bias = ones.dot(mu) / s;
  model.dual = mu - model.bias * nu;
  model.gamma = gamma;
  model.kernel = kernel;
  return model;
}

double predict(const LssvModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.training_inputs.cols())
    throw DataError("predict: feature dimension mismatch");
  double f = model.bias;
  if (model.kernel.kind == KernelKind::Linear) {
    f += model.dual.dot(model.training_inputs * x);
  } else {
    const double inv = 1.0 / (2.0 * model.kernel.sigma * model.kernel.sigma);
    for (Eigen::Index i = 0; i < model.training_inputs.rows(); ++i) {
      const double d2 =
          (model.training_inputs.row(i).transpose() - x).squaredNorm();
      f += model.dual[i] * std::exp(-d2 * inv);
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Kendall's tau (Knight's merge-counting algorithm, tau-a denominator)
// ---------------------------------------------------------------------------

namespace {

// Strict inversions (v[i] > v[j] for i < j) by merge sort.
std::size_t count_inversions(std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> buf(n);
  std::size_t inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          inversions += mid - i;
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
      std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                buf.begin() + static_cast<std::ptrdiff_t>(hi),
                v.begin() + static_cast<std::ptrdiff_t>(lo));
    }
  }
  return inversions;
}

std::size_t tie_pairs(std::size_t run) { return run * (run - 1) / 2; }

}  // namespace

double kendall_tau(const std::vector<double>& u, const std::vector<double>& v) {
  const std::size_t n = u.size();
  if (v.size() != n) throw DataError("kendall_tau: length mismatch");
  if (n < 2) throw DataError("kendall_tau: need at least 2 observations");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (u[a] != u[b]) return u[a] < u[b];
    return v[a] < v[b];
  });

  // Tallies of pairs tied in u, in (u, v) jointly, and in v alone.
  std::size_t ties_u = 0, ties_uv = 0;
  std::size_t run_u = 1, run_uv = 1;
  std::vector<double> vs(n);
  vs[0] = v[order[0]];
  for (std::size_t i = 1; i < n; ++i) {
    vs[i] = v[order[i]];
    const bool same_u = u[order[i]] == u[order[i - 1]];
    const bool same_v = v[order[i]] == v[order[i - 1]];
    if (same_u) {
      ++run_u;
      if (same_v) {
        ++run_uv;
      } else {
        ties_uv += tie_pairs(run_uv);
        run_uv = 1;
      }
    } else {
      ties_u += tie_pairs(run_u);
      ties_uv += tie_pairs(run_uv);
      run_u = run_uv = 1;
    }
  }
  ties_u += tie_pairs(run_u);
  ties_uv += tie_pairs(run_uv);

  std::vector<double> v_sorted = vs;
  std::sort(v_sorted.begin(), v_sorted.end());
  std::size_t ties_v = 0, run_v = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (v_sorted[i] == v_sorted[i - 1])
      ++run_v;
    else {
      ties_v += tie_pairs(run_v);
      run_v = 1;
    }
  }
  ties_v += tie_pairs(run_v);

  const std::size_t total = n * (n - 1) / 2;
  const std::size_t discordant = count_inversions(vs);
  const std::size_t concordant =
      total - ties_u - ties_v + ties_uv - discordant;
  return (static_cast<double>(concordant) - static_cast<double>(discordant)) /
         static_cast<double>(total);
}

AqiBand tau_band(double tau) {
  constexpr double eps = 1e-12;
  if (tau < -1.0 - eps || tau > 1.0 + eps)
    throw DataError("tau_band: tau outside [-1, 1]");
  if (tau >= -1.0 - eps && tau <= -0.5) return AqiBand::VeryPoor;
  if (std::abs(tau) <= eps) return AqiBand::Good;
  if (tau > -0.5 && tau < 0) return AqiBand::Poor;
  if (tau > 0 && tau <= 0.5) return AqiBand::Satisfactory;
  if (tau > 0.5 && tau <= 1.0 + eps) return AqiBand::Moderate;
  return AqiBand::Severe;
}

AqiResult classify_aqi(const LssvModel& model, const Eigen::VectorXd& x,
                       const AqiBreakpoints& bp) {
  double aqi = std::clamp(predict(model, x), 0.0, 500.0);
  return {aqi, bp.band_of(aqi)};
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

static void put(std::ostringstream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

std::string save_model(const LssvModel& model) {
  std::ostringstream out;
  out << "DRLSSV1\n";
  out << "kernel " << (model.kernel.kind == KernelKind::Rbf ? "rbf" : "linear");
  if (model.kernel.kind == KernelKind::Rbf) {
    out << ' ';
    put(out, model.kernel.sigma);
  }
  out << "\ngamma ";
  put(out, model.gamma);
  out << "\nk " << model.training_inputs.cols();
  out << "\nn " << model.training_inputs.rows();
  out << "\nB ";
  put(out, model.bias);
  out << "\ndual";
  for (Eigen::Index i = 0; i < model.dual.size(); ++i) {
    out << ' ';
    put(out, model.dual[i]);
  }
  out << "\nrows\n";
  for (Eigen::Index i = 0; i < model.training_inputs.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.training_inputs.cols(); ++j) {
      if (j) out << ' ';
      put(out, model.training_inputs(i, j));
    }
    out << '\n';
  }
  return out.str();
}

LssvModel load_model(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  in >> tok;
  if (tok != "DRLSSV1") throw DataError("load_model: bad header");
  LssvModel model;
  in >> tok;
  if (tok != "kernel") throw DataError("load_model: expected kernel");
  in >> tok;
  if (tok == "rbf") {
    model.kernel.kind = KernelKind::Rbf;
    if (!(in >> model.kernel.sigma) || !(model.kernel.sigma > 0))
      throw DataError("load_model: bad sigma");
  } else if (tok == "linear") {
    model.kernel.kind = KernelKind::Linear;
  } else {
    throw DataError("load_model: unknown kernel '" + tok + "'");
  }
  Eigen::Index k = 0, n = 0;
  in >> tok >> model.gamma;
  if (tok != "gamma" || !in) throw DataError("load_model: bad gamma");
  in >> tok >> k;
  if (tok != "k" || !in || k < 1) throw DataError("load_model: bad k");
  in >> tok >> n;
  if (tok != "n" || !in || n < 1) throw DataError("load_model: bad n");
  in >> tok >> model.bias;
  if (tok != "B" || !in) throw DataError("load_model: bad bias");
  in >> tok;
  if (tok != "dual") throw DataError("load_model: expected dual");
  model.dual.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(in >> model.dual[i])) throw DataError("load_model: truncated dual");
  in >> tok;
  if (tok != "rows") throw DataError("load_model: expected rows");
  model.training_inputs.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      if (!(in >> model.training_inputs(i, j)))
        throw DataError("load_model: truncated rows");
  return model;
}

}  // namespace drlssv
