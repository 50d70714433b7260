#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "cegan/datagen/dataset.hpp"
#include "cegan/inference/ite.hpp"
#include "cegan/training/trainer.hpp"

namespace cegan {

enum class MethodId { kCegan, kCeganLp, kLr1, kLr2, kKnn };
inline constexpr MethodId kAllMethods[] = {MethodId::kCegan, MethodId::kCeganLp, MethodId::kLr1, MethodId::kLr2,
                                           MethodId::kKnn};
std::string to_string(MethodId method);
MethodId parse_method_id(const std::string& name);

class IteEstimator {
 public:
  virtual ~IteEstimator() = default;
  // Expected outcome under do(t) for every row of x.
  virtual Matrix predict_outcome(const Matrix& x, int do_t) const = 0;
  virtual ItEstimate estimate(const Matrix& x) const;
};

// Linear model with intercept. Continuous outcomes use least squares;
// binary outcomes use logistic regression (Newton/IRLS). Rank-deficient
// systems fall back to ridge 1e-6.
struct LinearFit {
  Matrix coefficients;  // (1 + features) x y_dim
  std::vector<FeatureKind> kinds;
  bool used_ridge = false;

  Matrix predict(const Matrix& features) const;
};

inline constexpr double kRidgeFallback = 1e-6;
LinearFit fit_linear(const Matrix& features, const Matrix& y, const std::vector<FeatureKind>& kinds);

// One model on [x, t]; counterfactuals by toggling t.
class Lr1Estimator : public IteEstimator {
 public:
  explicit Lr1Estimator(LinearFit fit) : fit_(std::move(fit)) {}
  Matrix predict_outcome(const Matrix& x, int do_t) const override;
  const LinearFit& linear_fit() const { return fit_; }

 private:
  LinearFit fit_;
};

// One model per treatment arm on x.
class Lr2Estimator : public IteEstimator {
 public:
  Lr2Estimator(LinearFit arm0, LinearFit arm1) : arms_{std::move(arm0), std::move(arm1)} {}
  Matrix predict_outcome(const Matrix& x, int do_t) const override;

 private:
  LinearFit arms_[2];
};

// Mean observed outcome among the k nearest (Euclidean on x) training
// subjects in the requested arm; distance ties go to the lower training index.
class KnnEstimator : public IteEstimator {
 public:
  KnnEstimator(const Dataset& train, std::size_t k);
  Matrix predict_outcome(const Matrix& x, int do_t) const override;
  // Training-row indices of the k neighbours of `query` within arm do_t.
  std::vector<std::size_t> neighbours(const RowVector& query, int do_t) const;

 private:
  std::size_t k_;
  Matrix arm_x_[2];
  Matrix arm_y_[2];
  std::vector<std::size_t> arm_index_[2];
};

class CeganEstimator : public IteEstimator {
 public:
  CeganEstimator(FitResult fit, IteConfig ite) : fit_(std::move(fit)), ite_(ite) {}
  Matrix predict_outcome(const Matrix& x, int do_t) const override;
  ItEstimate estimate(const Matrix& x) const override;
  const CeganModel& model() const { return fit_.model; }
  const TrainTrace& trace() const { return fit_.trace; }
  const IteConfig& ite_config() const { return ite_; }

 private:
  FitResult fit_;
  IteConfig ite_;
};

std::unique_ptr<Lr1Estimator> fit_lr1(const Dataset& train);
// Throws ValidationError naming the arm when an arm is empty.
std::unique_ptr<Lr2Estimator> fit_lr2(const Dataset& train);
// Throws ValidationError when k == 0 or an arm has fewer than k subjects.
std::unique_ptr<KnnEstimator> fit_knn(const Dataset& train, std::size_t k = 5);
std::unique_ptr<CeganEstimator> fit_cegan(const Dataset& train, const Dataset& valid, const TrainConfig& train_config,
                                          const ModelConfig& model_config, const IteConfig& ite);
std::unique_ptr<CeganEstimator> fit_cegan_lp(const Dataset& train, const Dataset& valid,
                                             const TrainConfig& train_config, const ModelConfig& model_config,
                                             const IteConfig& ite);

}  // namespace cegan
