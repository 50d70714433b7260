#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cegan/datagen/generators.hpp"
#include "cegan/inference/ite.hpp"
#include "cegan/training/trainer.hpp"
#include "fixtures.hpp"

using namespace cegan;
using fixtures::tiny_model;

namespace {

const DataSchema kCont = DataSchema::uniform(3, FeatureKind::kContinuous, 1, FeatureKind::kContinuous);
const DataSchema kBin = DataSchema::uniform(3, FeatureKind::kContinuous, 1, FeatureKind::kBinary);

// Model whose every subnetwork has nonzero biases, so noise reaches outputs.
CeganModel lively_model(const DataSchema& s, std::uint64_t seed) {
  CeganModel m = tiny_model(s, seed, 2);
  Rng jitter(seed + 1000);
  for (ParamGroup g : kAllParamGroups) {
    for (auto& l : m.group(g).params.layers) {
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.3 + 0.1 * jitter.normal();
    }
  }
  return m;
}

// Row index of the treatment entry in the predictor input (z | x | t | eps).
Eigen::Index predictor_t_row(const CeganModel& m) {
  return static_cast<Eigen::Index>(m.config.latent_dim + m.schema.x_dim());
}

IteConfig ite_config(std::size_t samples, std::uint64_t seed, ZMode mode = ZMode::kSampleT, bool paired = true) {
  IteConfig c;
  c.mc_samples = samples;
  c.seed = seed;
  c.z_mode = mode;
  c.paired = paired;
  return c;
}

}  // namespace

TEST_CASE("constant predictor: estimate equals the constant for any x and M") {
  CeganModel m = lively_model(kCont, 1);
  fixtures::zero_group(m, ParamGroup::kPredictor);
  m.predictor.params.layers.back().bias(0) = 2.75;
  const Matrix x = Rng(3).normal_matrix(10, 3);
  for (std::size_t samples : {1u, 7u, 100u}) {
    for (int t : {0, 1}) {
      const Matrix y = estimate_outcome(m, x, t, ite_config(samples, 5));
      for (Eigen::Index i = 0; i < y.rows(); ++i) CHECK(y(i, 0) == doctest::Approx(2.75).epsilon(1e-15));
    }
  }
}

TEST_CASE("M = 1 with a fixed seed is repeatable") {
  const CeganModel m = lively_model(kCont, 2);
  const Matrix x = Rng(3).normal_matrix(5, 3);
  CHECK(estimate_outcome(m, x, 1, ite_config(1, 9)) == estimate_outcome(m, x, 1, ite_config(1, 9)));
  CHECK(estimate_outcome(m, x, 1, ite_config(1, 9)) != estimate_outcome(m, x, 1, ite_config(1, 10)));
}

TEST_CASE("M = 10000 agrees with M = 100 within three standard errors") {
  const CeganModel m = lively_model(kCont, 3);
  const Matrix x = Rng(4).normal_matrix(10, 3);
  const Matrix big = estimate_outcome(m, x, 1, ite_config(10000, 1));
  const Matrix small = estimate_outcome(m, x, 1, ite_config(100, 2));
  // Spread of a single draw, from independent M = 1 estimates.
  const int reps = 400;
  Vector sum = Vector::Zero(10), sq = Vector::Zero(10);
  for (int r = 0; r < reps; ++r) {
    const Matrix one = estimate_outcome(m, x, 1, ite_config(1, 100 + r));
    sum += one.col(0);
    sq += one.col(0).cwiseAbs2();
  }
  for (Eigen::Index i = 0; i < 10; ++i) {
    const double mean = sum(i) / reps;
    const double sd = std::sqrt((sq(i) / reps - mean * mean) * reps / (reps - 1));
    const double se = sd * std::sqrt(1.0 / 100 + 1.0 / 10000);
    CHECK(std::abs(big(i, 0) - small(i, 0)) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("predictor equal to t gives ITE exactly 1") {
  CeganModel m = lively_model(kCont, 4);
  fixtures::zero_group(m, ParamGroup::kPredictor);
  auto& layers = m.predictor.params.layers;
  layers[0].weight(predictor_t_row(m), 0) = 1.0;
  layers[1].weight(0, 0) = 1.0;
  layers[2].weight(0, 0) = 1.0;
  const Matrix x = Rng(5).normal_matrix(20, 3);
  for (ZMode mode : {ZMode::kSampleT, ZMode::kWeightedSum}) {
    for (bool paired : {true, false}) {
      const ItEstimate e = estimate_ite(m, x, ite_config(13, 6, mode, paired));
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        CHECK(e.y1_hat(i, 0) == 1.0);
        CHECK(e.y0_hat(i, 0) == 0.0);
        CHECK(e.ite(i, 0) == 1.0);
      }
    }
  }
}

TEST_CASE("predictor that ignores t gives ITE exactly 0 with paired draws") {
  CeganModel m = lively_model(kBin, 5);
  m.predictor.params.layers[0].weight.row(predictor_t_row(m)).setZero();
  const Matrix x = Rng(6).normal_matrix(20, 3);
  const ItEstimate e = estimate_ite(m, x, ite_config(50, 7));
  CHECK(e.ite.isZero(0.0));
  CHECK(e.ite == e.y1_hat - e.y0_hat);
}

TEST_CASE("ite equals the difference of the two outcome estimates") {
  const CeganModel m = lively_model(kCont, 6);
  const Matrix x = Rng(7).normal_matrix(30, 3);
  const IteConfig c = ite_config(40, 8);
  const ItEstimate e = estimate_ite(m, x, c);
  CHECK(e.y1_hat == estimate_outcome(m, x, 1, c));
  CHECK(e.y0_hat == estimate_outcome(m, x, 0, c));
  CHECK(e.ite == e.y1_hat - e.y0_hat);
}

TEST_CASE("estimates do not depend on how subjects are chunked") {
  const CeganModel m = lively_model(kCont, 7);
  const Matrix x = Rng(8).normal_matrix(300, 3);
  const IteConfig c = ite_config(5, 9);
  const ItEstimate all = estimate_ite(m, x, c);
  const ItEstimate head = estimate_ite(m, x.topRows(200), c);
  CHECK(all.ite.topRows(200) == head.ite);
}

TEST_CASE("binary outcomes stay in [0,1] and ITE in [-1,1]") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CeganModel m = lively_model(kBin, seed);
    for (auto& l : m.predictor.params.layers) l.weight *= 20.0;
    const Matrix x = 5.0 * Rng(seed).normal_matrix(50, 3);
    for (ZMode mode : {ZMode::kSampleT, ZMode::kWeightedSum}) {
      const ItEstimate e = estimate_ite(m, x, ite_config(20, seed, mode));
      CHECK(e.y1_hat.minCoeff() >= 0.0);
      CHECK(e.y1_hat.maxCoeff() <= 1.0);
      CHECK(e.y0_hat.minCoeff() >= 0.0);
      CHECK(e.y0_hat.maxCoeff() <= 1.0);
      CHECK(e.ite.cwiseAbs().maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("paired draws reduce the Monte-Carlo variance of the ITE") {
  const CeganModel m = lively_model(kCont, 8);
  const Matrix x = Rng(9).normal_matrix(200, 3);
  auto mean_variance = [&](bool paired) {
    const int reps = 20;
    Matrix sum = Matrix::Zero(200, 1), sq = Matrix::Zero(200, 1);
    for (int r = 0; r < reps; ++r) {
      const Matrix ite = estimate_ite(m, x, ite_config(10, 500 + r, ZMode::kSampleT, paired)).ite;
      sum += ite;
      sq += ite.cwiseAbs2();
    }
    const Matrix mean = sum / reps;
    return ((sq / reps - mean.cwiseAbs2()) * reps / (reps - 1)).mean();
  };
  CHECK(mean_variance(true) <= mean_variance(false));
}

TEST_CASE("sample-t and weighted-sum modes agree in expectation") {
  ToyGenConfig tc;
  tc.n = 40;
  tc.seed = 3;
  const Dataset toy = generate_toy(tc);
  CeganModel m = lively_model(toy.schema, 9);
  m.x_scaler = InputScaler::fit(toy.x, toy.schema.x_kinds);
  const Matrix a = estimate_outcome(m, toy.x, 1, ite_config(10000, 1, ZMode::kSampleT));
  const Matrix b = estimate_outcome(m, toy.x, 1, ite_config(10000, 2, ZMode::kWeightedSum));
  CHECK((a - b).cwiseAbs().mean() < 0.02);
}

TEST_CASE("trained toy model recovers the sign of the true ATE") {
  ToyGenConfig tc;
  tc.n = 1000;
  tc.zeta = 0.0;
  tc.seed = 21;
  const Dataset all = generate_toy(tc);
  const SplitIndices s = split(all.size(), kDefaultSplit, 22);
  const Dataset train = all.subset(s.train), valid = all.subset(s.valid), test = all.subset(s.test);
  TrainConfig c;
  c.max_iterations = 1500;
  c.adam.learning_rate = 1e-3;
  c.seed = 23;
  ModelConfig mc;
  mc.set_latent_dim(5);
  mc.hidden_dims = {32, 32};
  mc.propensity_hidden_dims = {32, 32};
  const FitResult r = fit(train, valid, c, mc);
  const ItEstimate e = estimate_ite(r.model, test.x, ite_config(100, 24));
  const double true_ate = (*test.y1 - *test.y0).mean();
  const double est_ate = e.ite.mean();
  CHECK(true_ate > 0.0);
  CHECK(est_ate > 0.0);
}

TEST_CASE("intermediate diagnostics: fair propensity and degenerate treatment draws") {
  CeganModel m = lively_model(kCont, 10);
  const Matrix x = Rng(11).normal_matrix(25, 3);
  Vector t_star(25);
  for (Eigen::Index i = 0; i < 25; ++i) t_star(i) = i % 2;

  CeganModel fair = m;
  fixtures::zero_group(fair, ParamGroup::kPropensity);
  const IntermediateDiagnostics d = intermediate_diagnostics(fair, x, t_star, ite_config(30, 1));
  for (Eigen::Index i = 0; i < 25; ++i) {
    CHECK(d.treatment_xent(i) == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(d.outcome_gap(i) >= 0.0);
  }
  CHECK(d.outcome_gap.maxCoeff() > 0.0);

  // Propensity pinned at 1 - 1e-7: t~ = 1 = t* in every draw.
  CeganModel sure = m;
  fixtures::zero_group(sure, ParamGroup::kPropensity);
  sure.propensity.params.layers.back().bias(0) = 50.0;
  const IntermediateDiagnostics s = intermediate_diagnostics(sure, x, Vector::Ones(25), ite_config(30, 1));
  CHECK(s.outcome_gap.isZero(0.0));
  CHECK(s.treatment_xent.maxCoeff() < 1e-6);
  CHECK(s.mean_treatment_xent() >= 0.0);
}

TEST_CASE("ITE CSV layout") {
  ItEstimate e{Matrix::Constant(2, 1, 0.75), Matrix::Constant(2, 1, 0.25), Matrix::Constant(2, 1, 0.5)};
  std::ostringstream out;
  write_ite_csv(out, e);
  CHECK(out.str() == "subject-id,y1_hat,y0_hat,ite_hat\n0,0.75,0.25,0.5\n1,0.75,0.25,0.5\n");

  ItEstimate two{Matrix::Zero(1, 2), Matrix::Zero(1, 2), Matrix::Zero(1, 2)};
  std::ostringstream out2;
  write_ite_csv(out2, two);
  CHECK(out2.str().rfind("subject-id,y1_hat_0,y1_hat_1,y0_hat_0,y0_hat_1,ite_hat_0,ite_hat_1\n", 0) == 0);
}

TEST_CASE("inference config validation") {
  const CeganModel m = lively_model(kCont, 1);
  CHECK_THROWS_AS(estimate_ite(m, Matrix::Zero(2, 3), ite_config(0, 1)), ValidationError);
  CHECK_THROWS_AS(estimate_ite(m, Matrix::Zero(2, 4), ite_config(5, 1)), ShapeError);
  CHECK_THROWS_AS(estimate_outcome(m, Matrix::Zero(2, 3), 2, ite_config(5, 1)), ValidationError);
  CHECK(parse_z_mode("weighted-sum") == ZMode::kWeightedSum);
  CHECK_THROWS_AS(parse_z_mode("mixture"), ValidationError);
}
