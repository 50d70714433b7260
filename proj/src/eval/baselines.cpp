#include "cegan/eval/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Dense>

namespace cegan {
namespace {

constexpr int kMaxNewtonIterations = 100;
constexpr double kNewtonTolerance = 1e-8;

Matrix with_intercept(const Matrix& features) {
  Matrix out(features.rows(), features.cols() + 1);
  out.col(0).setOnes();
  out.rightCols(features.cols()) = features;
  return out;
}

// Solves (A + ridge I) b = rhs, adding the ridge only when A is singular.
Vector solve_normal(const Matrix& a, const Vector& rhs, bool* used_ridge) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() == a.rows()) {
    Vector b = qr.solve(rhs);
    if (b.allFinite()) return b;
  }
  *used_ridge = true;
  Eigen::MatrixXd reg = a;
  reg.diagonal().array() += kRidgeFallback;
  return Eigen::LDLT<Eigen::MatrixXd>(reg).solve(rhs);
}

Vector fit_least_squares(const Matrix& design, const Vector& y, bool* used_ridge) {
  const Matrix gram = design.transpose() * design;
  return solve_normal(gram, design.transpose() * y, used_ridge);
}

Vector fit_logistic(const Matrix& design, const Vector& y, bool* used_ridge) {
  Vector beta = Vector::Zero(design.cols());
  for (int iter = 0; iter < kMaxNewtonIterations; ++iter) {
    const Vector eta = design * beta;
    Vector p(eta.size());
    Vector w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      p(i) = sigmoid(eta(i));
      w(i) = std::max(p(i) * (1.0 - p(i)), 1e-12);
    }
    const Vector grad = design.transpose() * (y - p);
    const Matrix hessian = design.transpose() * w.asDiagonal() * design;
    const Vector step = solve_normal(hessian, grad, used_ridge);
    if (!step.allFinite()) break;
    beta += step;
    if (step.cwiseAbs().maxCoeff() < kNewtonTolerance * (1.0 + beta.cwiseAbs().maxCoeff())) break;
  }
  return beta;
}

Matrix with_treatment(const Matrix& x, double t) {
  Matrix out(x.rows(), x.cols() + 1);
  out.leftCols(x.cols()) = x;
  out.col(x.cols()).setConstant(t);
  return out;
}

Dataset arm(const Dataset& data, int t) {
  std::vector<std::size_t> rows;
  for (Eigen::Index i = 0; i < data.t.size(); ++i) {
    if (data.t(i) == static_cast<double>(t)) rows.push_back(static_cast<std::size_t>(i));
  }
  if (rows.empty()) throw ValidationError("treatment arm t=" + std::to_string(t) + " is empty");
  return data.subset(rows);
}

}  // namespace

std::string to_string(MethodId method) {
  switch (method) {
    case MethodId::kCegan: return "cegan";
    case MethodId::kCeganLp: return "cegan-lp";
    case MethodId::kLr1: return "lr1";
    case MethodId::kLr2: return "lr2";
    case MethodId::kKnn: return "knn";
  }
  return "?";
}

MethodId parse_method_id(const std::string& name) {
  for (MethodId m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown method '" + name + "'");
}

ItEstimate IteEstimator::estimate(const Matrix& x) const {
  ItEstimate e;
  e.y1_hat = predict_outcome(x, 1);
  e.y0_hat = predict_outcome(x, 0);
  e.ite = e.y1_hat - e.y0_hat;
  return e;
}

Matrix LinearFit::predict(const Matrix& features) const {
  const Matrix eta = with_intercept(features) * coefficients;
  Matrix out(eta.rows(), eta.cols());
  for (Eigen::Index j = 0; j < eta.cols(); ++j) {
    for (Eigen::Index i = 0; i < eta.rows(); ++i) {
      out(i, j) = kinds[j] == FeatureKind::kBinary ? sigmoid(eta(i, j)) : eta(i, j);
    }
  }
  return out;
}

LinearFit fit_linear(const Matrix& features, const Matrix& y, const std::vector<FeatureKind>& kinds) {
  if (features.rows() == 0) throw ValidationError("fit_linear: no training rows");
  require_shape(y, features.rows(), kinds.size(), "fit_linear y");
  const Matrix design = with_intercept(features);
  LinearFit fit;
  fit.kinds = kinds;
  fit.coefficients.resize(design.cols(), y.cols());
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const Vector target = y.col(j);
    fit.coefficients.col(j) = kinds[j] == FeatureKind::kBinary ? fit_logistic(design, target, &fit.used_ridge)
                                                               : fit_least_squares(design, target, &fit.used_ridge);
  }
  return fit;
}

Matrix Lr1Estimator::predict_outcome(const Matrix& x, int do_t) const {
  return fit_.predict(with_treatment(x, do_t));
}

Matrix Lr2Estimator::predict_outcome(const Matrix& x, int do_t) const { return arms_[do_t == 1].predict(x); }

KnnEstimator::KnnEstimator(const Dataset& train, std::size_t k) : k_(k) {
  if (k == 0) throw ValidationError("knn: k must be >= 1");
  for (int t = 0; t < 2; ++t) {
    for (Eigen::Index i = 0; i < train.t.size(); ++i) {
      if (train.t(i) == static_cast<double>(t)) arm_index_[t].push_back(static_cast<std::size_t>(i));
    }
    if (arm_index_[t].size() < k) {
      throw ValidationError("knn: arm t=" + std::to_string(t) + " has " + std::to_string(arm_index_[t].size()) +
                            " subjects, fewer than k=" + std::to_string(k));
    }
    arm_x_[t].resize(static_cast<Eigen::Index>(arm_index_[t].size()), train.x.cols());
    arm_y_[t].resize(static_cast<Eigen::Index>(arm_index_[t].size()), train.y.cols());
    for (std::size_t r = 0; r < arm_index_[t].size(); ++r) {
      arm_x_[t].row(r) = train.x.row(arm_index_[t][r]);
      arm_y_[t].row(r) = train.y.row(arm_index_[t][r]);
    }
  }
}

std::vector<std::size_t> KnnEstimator::neighbours(const RowVector& query, int do_t) const {
  const int a = do_t == 1;
  const Matrix& xs = arm_x_[a];
  std::vector<std::pair<double, std::size_t>> dist(static_cast<std::size_t>(xs.rows()));
  for (Eigen::Index r = 0; r < xs.rows(); ++r) {
    dist[r] = {(xs.row(r) - query).squaredNorm(), static_cast<std::size_t>(r)};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
  std::vector<std::size_t> out(k_);
  for (std::size_t i = 0; i < k_; ++i) out[i] = arm_index_[a][dist[i].second];
  return out;
}

Matrix KnnEstimator::predict_outcome(const Matrix& x, int do_t) const {
  const int a = do_t == 1;
  const Matrix& xs = arm_x_[a];
  const Matrix& ys = arm_y_[a];
  Matrix out(x.rows(), ys.cols());
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(xs.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index r = 0; r < xs.rows(); ++r) dist[r] = {(xs.row(r) - x.row(i)).squaredNorm(), r};
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
    RowVector sum = RowVector::Zero(ys.cols());
    for (std::size_t n = 0; n < k_; ++n) sum += ys.row(dist[n].second);
    out.row(i) = sum / static_cast<double>(k_);
  }
  return out;
}

Matrix CeganEstimator::predict_outcome(const Matrix& x, int do_t) const {
  return estimate_outcome(fit_.model, x, do_t, ite_);
}

ItEstimate CeganEstimator::estimate(const Matrix& x) const { return estimate_ite(fit_.model, x, ite_); }

std::unique_ptr<Lr1Estimator> fit_lr1(const Dataset& train) {
  Matrix features(train.x.rows(), train.x.cols() + 1);
  features.leftCols(train.x.cols()) = train.x;
  features.col(train.x.cols()) = train.t;
  return std::make_unique<Lr1Estimator>(fit_linear(features, train.y, train.schema.y_kinds));
}

std::unique_ptr<Lr2Estimator> fit_lr2(const Dataset& train) {
  const Dataset a0 = arm(train, 0);
  const Dataset a1 = arm(train, 1);
  return std::make_unique<Lr2Estimator>(fit_linear(a0.x, a0.y, train.schema.y_kinds),
                                        fit_linear(a1.x, a1.y, train.schema.y_kinds));
}

std::unique_ptr<KnnEstimator> fit_knn(const Dataset& train, std::size_t k) {
  return std::make_unique<KnnEstimator>(train, k);
}

std::unique_ptr<CeganEstimator> fit_cegan(const Dataset& train, const Dataset& valid, const TrainConfig& train_config,
                                          const ModelConfig& model_config, const IteConfig& ite) {
  return std::make_unique<CeganEstimator>(fit(train, valid, train_config, model_config), ite);
}

std::unique_ptr<CeganEstimator> fit_cegan_lp(const Dataset& train, const Dataset& valid,
                                             const TrainConfig& train_config, const ModelConfig& model_config,
                                             const IteConfig& ite) {
  return std::make_unique<CeganEstimator>(fit_prediction_only(train, valid, train_config, model_config), ite);
}

}  // namespace cegan
