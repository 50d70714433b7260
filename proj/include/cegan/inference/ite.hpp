#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "cegan/model/cegan_model.hpp"

namespace cegan {

// How p(z|x) is realised when estimating E[y | x, do(t)].
//   kSampleT:     t~ ~ Bern(q(t=1|x)), then z = f_I(x, t~, eps)
//   kWeightedSum: q(x) f_P(f_I(x,1,eps1), ...) + (1 - q(x)) f_P(f_I(x,0,eps0), ...)
enum class ZMode { kSampleT, kWeightedSum };
std::string to_string(ZMode mode);
ZMode parse_z_mode(const std::string& name);

struct IteConfig {
  std::size_t mc_samples = 100;
  ZMode z_mode = ZMode::kSampleT;
  // Share z (and eps_P) draws between do(t=1) and do(t=0).
  bool paired = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ItEstimate {
  Matrix y1_hat;
  Matrix y0_hat;
  Matrix ite;
};

// Monte-Carlo estimate of E[y | x, do(t)] for every row of x, with dropout
// off. Subject i draws from the stream Rng(seed).child(i), so results do not
// depend on batching.
Matrix estimate_outcome(const CeganModel& model, const Matrix& x, int do_t, const IteConfig& config);
ItEstimate estimate_ite(const CeganModel& model, const Matrix& x, const IteConfig& config);

// Intermediate-prediction errors for observed (x*, t*): the cross-entropy of
// t* against q(t=1|x*), and the mean |y_dot - y_tilde| between predictions
// conditioned on t* and on t~ ~ q(t|x*) (shared z/eps draws, averaged over
// columns and Monte-Carlo samples).
struct IntermediateDiagnostics {
  Vector treatment_xent;
  Vector outcome_gap;

  double mean_treatment_xent() const { return treatment_xent.size() ? treatment_xent.mean() : 0.0; }
  double mean_outcome_gap() const { return outcome_gap.size() ? outcome_gap.mean() : 0.0; }
};

IntermediateDiagnostics intermediate_diagnostics(const CeganModel& model, const Matrix& x, const Vector& t_star,
                                                 const IteConfig& config);

// CSV with columns subject-id,y1_hat,y0_hat,ite_hat (suffixed _j per outcome
// column when there is more than one).
void write_ite_csv(std::ostream& out, const ItEstimate& estimate);

}  // namespace cegan
