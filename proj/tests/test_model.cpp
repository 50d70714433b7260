#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "cegan/model/checkpoint.hpp"
#include "cegan/training/trainer.hpp"
#include "fixtures.hpp"

using namespace cegan;
using fixtures::tiny_model;
using fixtures::zero_all;

namespace {

const DataSchema kMixed{{FeatureKind::kContinuous, FeatureKind::kBinary, FeatureKind::kContinuous},
                        {FeatureKind::kBinary}};
const DataSchema kContinuous = DataSchema::uniform(2, FeatureKind::kContinuous, 1, FeatureKind::kContinuous);

double ln2() { return std::log(2.0); }

bool same_params(const CeganModel& a, const CeganModel& b, ParamGroup g) {
  const auto& la = a.group(g).params.layers;
  const auto& lb = b.group(g).params.layers;
  if (la.size() != lb.size()) return false;
  for (std::size_t i = 0; i < la.size(); ++i) {
    if (la[i].weight != lb[i].weight || la[i].bias != lb[i].bias) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("default model dimensions") {
  Rng init(1);
  const DataSchema s = DataSchema::uniform(5, FeatureKind::kContinuous, 1, FeatureKind::kBinary);
  const CeganModel m = make_cegan_model(s, ModelConfig{}, init);
  CHECK(m.config.latent_dim == 20);
  CHECK(m.config.dropout_rate == 0.6);
  CHECK(m.encoder.spec.hidden_dims == std::vector<std::size_t>{200, 200, 200});
  CHECK(m.encoder.spec.input_dim == 5 + 1 + 1 + 20);
  CHECK(m.encoder.spec.output_dim == 20);
  CHECK(m.inference.spec.input_dim == 5 + 1 + 20);
  CHECK(m.predictor.spec.input_dim == 20 + 5 + 1 + 20);
  CHECK(m.predictor.spec.output_dim == 1);
  CHECK(m.reconstructor.spec.input_dim == 20);
  CHECK(m.reconstructor.spec.output_dim == 5 + 1 + 1);
  CHECK(m.discriminator.spec.input_dim == 20 + 5 + 1 + 1);
  CHECK(m.discriminator.spec.output_dim == 1);
  CHECK(m.propensity.spec.input_dim == 5);
  CHECK_NOTHROW(m.validate());

  const Dataset d = fixtures::random_dataset(s, 3, 2);
  Rng rng(3);
  CHECK(encode(m, d.x, d.t, d.y, rng).cols() == 20);
}

TEST_CASE("encode: zero weights give zero latent; fixed seed repeats") {
  CeganModel m = tiny_model(kMixed, 1);
  const Dataset d = fixtures::random_dataset(kMixed, 6, 2);
  Rng a(5), b(5);
  CHECK(encode(m, d.x, d.t, d.y, a) == encode(m, d.x, d.t, d.y, b));
  zero_all(m);
  Rng c(9);
  CHECK(encode(m, d.x, d.t, d.y, c).isZero(0.0));
}

TEST_CASE("infer_z: zero weights, determinism and noise spread") {
  CeganModel m = tiny_model(kMixed, 1);
  const Dataset d = fixtures::random_dataset(kMixed, 1, 2);
  Rng a(5), b(5);
  CHECK(infer_z(m, d.x, d.t, a) == infer_z(m, d.x, d.t, b));

  // Nonzero biases keep ReLU units alive so the noise reaches the output.
  for (auto& l : m.inference.params.layers) l.bias.setConstant(0.5);
  Rng draws(11);
  std::vector<double> first;
  for (int i = 0; i < 100; ++i) first.push_back(infer_z(m, d.x, d.t, draws)(0, 0));
  double mean = 0;
  for (double v : first) mean += v / 100;
  double var = 0;
  for (double v : first) var += (v - mean) * (v - mean) / 99;
  CHECK(var > 0.0);

  zero_all(m);
  Rng c(1);
  CHECK(infer_z(m, d.x, d.t, c).isZero(0.0));
}

TEST_CASE("predict_y: zero weights give sigmoid(0) or 0 by outcome kind") {
  const DataSchema s{{FeatureKind::kContinuous}, {FeatureKind::kBinary, FeatureKind::kContinuous}};
  CeganModel m = tiny_model(s, 1);
  zero_all(m);
  const Dataset d = fixtures::random_dataset(s, 4, 2);
  Rng rng(3);
  const Matrix y = predict_y(m, Matrix::Ones(4, 2), d.x, d.t, rng);
  REQUIRE(y.cols() == 2);
  for (Eigen::Index r = 0; r < 4; ++r) {
    CHECK(y(r, 0) == 0.5);
    CHECK(y(r, 1) == 0.0);
  }
  CHECK_THROWS_AS(predict_y(m, Matrix::Ones(4, 3), d.x, d.t, rng), ShapeError);
}

TEST_CASE("reconstruct: head layout and zero-weight values") {
  CeganModel m = tiny_model(kMixed, 1);
  zero_all(m);
  const Reconstruction r = reconstruct(m, Matrix::Ones(3, 2));
  CHECK(r.x_bar.cols() == 3);
  CHECK(r.t_bar.size() == 3);
  CHECK(r.y_bar.cols() == 1);
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(r.t_bar(i) == 0.5);
    CHECK(r.x_bar(i, 0) == 0.0);
    CHECK(r.x_bar(i, 1) == 0.5);  // binary feature head
    CHECK(r.x_bar(i, 2) == 0.0);
    CHECK(r.y_bar(i, 0) == 0.5);
  }
}

TEST_CASE("reconstruct: training the autoencoder lowers L_R on a 50-sample fixture") {
  CeganModel m = tiny_model(kContinuous, 4);
  const Dataset d = fixtures::random_dataset(kContinuous, 50, 5);
  const Batch all = full_batch(d);
  auto eval_lr = [&] {
    Rng r(77);
    const StepDraws draws = draw_step(m, all.size(), r, StepKind::kReconstruction, false);
    return reconstruction_objective(m, all, draws).loss;
  };
  const double before = eval_lr();
  AdamConfig adam;
  adam.learning_rate = 1e-2;
  Rng rng(6);
  for (int i = 0; i < 300; ++i) train_reconstruction_step(m, all, rng, adam);
  CHECK(eval_lr() < before);
}

TEST_CASE("discriminate: zero weights give one half, extreme inputs stay inside (0,1)") {
  CeganModel m = tiny_model(kMixed, 1);
  const Dataset d = fixtures::random_dataset(kMixed, 5, 2);
  CeganModel z = m;
  zero_all(z);
  const Vector half = discriminate(z, Matrix::Ones(5, 2), d.x, d.t, d.y);
  for (Eigen::Index i = 0; i < half.size(); ++i) CHECK(half(i) == 0.5);

  for (auto& l : m.discriminator.params.layers) l.weight *= 1e4;
  const Vector p = discriminate(m, 100.0 * Matrix::Ones(5, 2), 100.0 * d.x, d.t, d.y);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    CHECK(p(i) >= kProbabilityFloor);
    CHECK(p(i) <= 1.0 - kProbabilityFloor);
  }
}

TEST_CASE("elementwise loss hand values") {
  const std::vector<double> a{1, 2}, zero{0, 0};
  CHECK(elementwise_loss(a, zero, FeatureKind::kContinuous) == 5.0);
  CHECK(elementwise_loss(a, a, FeatureKind::kContinuous) == 0.0);
  const std::vector<double> one{1}, half{0.5};
  CHECK(elementwise_loss(one, half, FeatureKind::kBinary) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(elementwise_loss(one, half, FeatureKind::kBinary) == doctest::Approx(ln2()).epsilon(1e-15));
  CHECK_THROWS_AS(elementwise_loss(a, one, FeatureKind::kContinuous), ShapeError);
  // Binary loss is smallest as the prediction approaches the label.
  const std::vector<double> p9{0.9}, p99{0.99};
  CHECK(elementwise_loss(one, p99, FeatureKind::kBinary) < elementwise_loss(one, p9, FeatureKind::kBinary));
  const std::vector<double> exact{1.0};
  CHECK(std::isfinite(elementwise_loss(std::vector<double>{0.0}, exact, FeatureKind::kBinary)));
}

TEST_CASE("reconstruction loss sums the three blocks") {
  const DataSchema s = DataSchema::uniform(2, FeatureKind::kContinuous, 1, FeatureKind::kContinuous);
  Matrix x(1, 2);
  x << 1, 2;
  Vector t(1);
  t << 1;
  Matrix y(1, 1);
  y << 3;
  Reconstruction r{Matrix::Zero(1, 2), Vector::Constant(1, 0.5), Matrix::Constant(1, 1, 2.0)};
  CHECK(reconstruction_loss(x, t, y, r, s)(0) == doctest::Approx(6.0 + 0.693147).epsilon(1e-6));

  Reconstruction perfect{x, Vector::Constant(1, 1.0 - 1e-12), y};
  CHECK(reconstruction_loss(x, t, y, perfect, s)(0) < 1e-6);
}

TEST_CASE("property: L_R and L_P are nonnegative") {
  Rng rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    const DataSchema s{{FeatureKind::kContinuous, FeatureKind::kBinary}, {FeatureKind::kBinary,
                                                                         FeatureKind::kContinuous}};
    const Dataset d = fixtures::random_dataset(s, 8, 100 + rep);
    Reconstruction r{rng.normal_matrix(8, 2), Vector(8), rng.normal_matrix(8, 2)};
    for (Eigen::Index i = 0; i < 8; ++i) {
      r.x_bar(i, 1) = rng.uniform();
      r.t_bar(i) = rng.uniform();
      r.y_bar(i, 0) = rng.uniform();
    }
    CHECK(reconstruction_loss(d.x, d.t, d.y, r, s).minCoeff() >= 0.0);
    CHECK(prediction_loss(d.y, r.y_bar, s).minCoeff() >= 0.0);
  }
}

TEST_CASE("value function hand values and bound") {
  CHECK(value_from_probabilities(Vector::Constant(1, 0.5), Vector::Constant(1, 0.5))(0) ==
        doctest::Approx(-1.386294).epsilon(1e-6));
  const double perfect = value_from_probabilities(Vector::Constant(1, 1.0), Vector::Constant(1, 0.0))(0);
  CHECK(perfect < 0.0);
  CHECK(perfect > -1e-6);
  CHECK(perfect <= 2.0 * std::log(1.0 - 1e-7) + 1e-15);

  CeganModel m = tiny_model(kMixed, 3);
  zero_all(m);
  const Dataset d = fixtures::random_dataset(kMixed, 4, 2);
  const Vector v = value_function(m, d.x, d.t, d.y, Matrix::Zero(4, 2), Matrix::Zero(4, 2), d.y);
  for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(v(i) == doctest::Approx(2.0 * std::log(0.5)));
}

TEST_CASE("prediction loss hand values") {
  const DataSchema bin = DataSchema::uniform(1, FeatureKind::kContinuous, 1, FeatureKind::kBinary);
  CHECK(prediction_loss(Matrix::Ones(1, 1), Matrix::Constant(1, 1, 0.5), bin)(0) ==
        doctest::Approx(0.693147).epsilon(1e-6));
  const Matrix y = Matrix::Constant(2, 1, 0.3);
  CHECK(prediction_loss(y, y, kContinuous)(0) == 0.0);
}

TEST_CASE("propensity: zero weights give one half; depends on x only") {
  CeganModel m = tiny_model(kMixed, 1);
  const Dataset d = fixtures::random_dataset(kMixed, 6, 2);
  CeganModel z = m;
  zero_all(z);
  const Vector p = propensity(z, d.x);
  for (Eigen::Index i = 0; i < p.size(); ++i) CHECK(p(i) == 0.5);

  Batch a = full_batch(d);
  Batch b = a;
  b.y.setConstant(1.0);
  Rng ra(4), rb(4);
  const StepDraws da = draw_step(m, a.size(), ra, StepKind::kPropensity);
  const StepDraws db = draw_step(m, b.size(), rb, StepKind::kPropensity);
  const ObjectiveValue va = propensity_objective(m, a, da);
  const ObjectiveValue vb = propensity_objective(m, b, db);
  CHECK(va.loss == vb.loss);
  CHECK(va.gradients[ParamGroup::kPropensity]->layers[0].weight ==
        vb.gradients[ParamGroup::kPropensity]->layers[0].weight);
}

TEST_CASE("propensity: training on t == 1 pushes q(t=1|x) above 0.9") {
  CeganModel m = tiny_model(kMixed, 2);
  Dataset d = fixtures::random_dataset(kMixed, 200, 3);
  d.t.setOnes();
  AdamConfig adam;
  adam.learning_rate = 1e-2;
  Rng rng(5);
  for (int i = 0; i < 500; ++i) train_propensity_step(m, sample_batch(d, 64, rng), rng, adam);
  CHECK(propensity(m, d.x).minCoeff() > 0.9);
}

TEST_CASE("property: every emitted probability lies in [1e-7, 1 - 1e-7]") {
  const DataSchema s{{FeatureKind::kBinary, FeatureKind::kContinuous}, {FeatureKind::kBinary}};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CeganModel m = tiny_model(s, seed);
    for (ParamGroup g : kAllParamGroups) {
      for (auto& l : m.group(g).params.layers) l.weight *= 50.0;
    }
    Dataset d = fixtures::random_dataset(s, 20, seed);
    d.x *= 30.0;
    Rng rng(seed);
    const Matrix zh = encode(m, d.x, d.t, d.y, rng);
    const Matrix z = infer_z(m, d.x, d.t, rng);
    const Matrix yh = predict_y(m, z, d.x, d.t, rng);
    const Reconstruction r = reconstruct(m, zh);
    auto in_range = [](const auto& v) {
      return v.minCoeff() >= kProbabilityFloor && v.maxCoeff() <= 1.0 - kProbabilityFloor;
    };
    CHECK(in_range(yh));
    CHECK(in_range(r.t_bar));
    CHECK(in_range(r.x_bar.col(0)));
    CHECK(in_range(r.y_bar));
    CHECK(in_range(discriminate(m, zh, d.x, d.t, d.y)));
    CHECK(in_range(propensity(m, d.x)));
    const Vector v = value_function(m, d.x, d.t, d.y, zh, z, yh);
    CHECK(v.maxCoeff() <= 0.0);
  }
}

TEST_CASE("property: all subnetworks compose for every schema shape") {
  for (std::size_t dx : {1u, 5u, 49u}) {
    for (std::size_t dy : {1u, 2u}) {
      for (int pattern = 0; pattern < 4; ++pattern) {
        DataSchema s;
        for (std::size_t j = 0; j < dx; ++j) {
          const bool binary = pattern == 1 || (pattern == 3 && j % 2 == 0);
          s.x_kinds.push_back(binary ? FeatureKind::kBinary : FeatureKind::kContinuous);
        }
        for (std::size_t j = 0; j < dy; ++j) {
          const bool binary = pattern == 2 || (pattern == 3 && j % 2 == 1);
          s.y_kinds.push_back(binary ? FeatureKind::kBinary : FeatureKind::kContinuous);
        }
        CAPTURE(s.describe());
        CeganModel m = tiny_model(s, dx * 10 + dy, 3);
        REQUIRE_NOTHROW(m.validate());
        const Dataset d = fixtures::random_dataset(s, 7, 1);
        Rng rng(2);
        const Matrix zh = encode(m, d.x, d.t, d.y, rng);
        const Matrix z = infer_z(m, d.x, d.t, rng);
        const Matrix yh = predict_y(m, z, d.x, d.t, rng);
        const Reconstruction r = reconstruct(m, zh);
        CHECK(zh.cols() == 3);
        CHECK(yh.cols() == static_cast<Eigen::Index>(dy));
        CHECK(r.x_bar.cols() == static_cast<Eigen::Index>(dx));
        CHECK(r.y_bar.cols() == static_cast<Eigen::Index>(dy));
        CHECK(discriminate(m, zh, d.x, d.t, d.y).size() == 7);
        CHECK(propensity(m, d.x).size() == 7);
        CHECK(reconstruction_loss(d.x, d.t, d.y, r, s).allFinite());
      }
    }
  }
}

TEST_CASE("encoder is shared by the reconstruction and adversarial paths") {
  CeganModel m = tiny_model(kContinuous, 3);
  const Dataset d = fixtures::random_dataset(kContinuous, 16, 4);
  const Batch b = full_batch(d);
  Rng draws_rng(5);
  const StepDraws draws = draw_step(m, b.size(), draws_rng);
  const double v_before = discriminator_objective(m, b, draws).loss;
  const CeganModel before = m;

  AdamConfig adam;
  adam.learning_rate = 1e-2;
  Rng step(8);
  train_reconstruction_step(m, b, step, adam);
  CHECK_FALSE(same_params(m, before, ParamGroup::kEncoder));
  // The update made through L_R is visible to the adversarial value.
  CHECK(discriminator_objective(m, b, draws).loss != v_before);

  const CeganModel mid = m;
  Rng gen(9);
  train_generator_step(m, b, gen, adam, 1.0);
  CHECK_FALSE(same_params(m, mid, ParamGroup::kEncoder));
  CHECK(reconstruction_objective(m, b, draws).loss != reconstruction_objective(mid, b, draws).loss);
}

TEST_CASE("input scaler standardizes continuous columns only") {
  Matrix x(4, 2);
  x << 1, 0, 3, 1, 5, 1, 7, 0;
  const InputScaler s = InputScaler::fit(x, {FeatureKind::kContinuous, FeatureKind::kBinary});
  CHECK(s.shift(0) == 4.0);
  CHECK(s.scale(0) == doctest::Approx(std::sqrt(5.0)));
  CHECK(s.shift(1) == 0.0);
  CHECK(s.scale(1) == 1.0);
  const Matrix z = s.apply(x);
  CHECK(z.col(0).mean() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(z.col(1) == x.col(1));

  Matrix constant = Matrix::Constant(3, 1, 2.0);
  const InputScaler c = InputScaler::fit(constant, {FeatureKind::kContinuous});
  CHECK(c.scale(0) == 1.0);
}

TEST_CASE("checkpoint round trip is exact and rejects a mismatched schema") {
  CeganModel m = tiny_model(kMixed, 8);
  const Dataset d = fixtures::random_dataset(kMixed, 30, 1);
  m.x_scaler = InputScaler::fit(d.x, kMixed.x_kinds);
  for (auto& l : m.predictor.params.layers) l.bias.setConstant(0.1 / 3.0);
  std::stringstream buf;
  save_checkpoint(buf, Checkpoint{m, "abc123"});
  const Checkpoint back = load_checkpoint(buf, kMixed);
  CHECK(back.train_config_fingerprint == "abc123");
  CHECK(back.model.schema == m.schema);
  CHECK(back.model.config == m.config);
  CHECK(back.model.x_scaler == m.x_scaler);
  for (ParamGroup g : kAllParamGroups) {
    CHECK(same_params(back.model, m, g));
    CHECK(back.model.group(g).spec == m.group(g).spec);
  }

  std::stringstream again(buf.str());
  CHECK_THROWS_AS(load_checkpoint(again, kContinuous), ValidationError);
  std::stringstream junk("{\"format\": 3}");
  CHECK_THROWS_AS(load_checkpoint(junk), ValidationError);
}

TEST_CASE("schema and config validation") {
  CHECK_THROWS_AS(DataSchema{}.validate(), ValidationError);
  ModelConfig c;
  c.latent_dim = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.dropout_rate = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK(parse_param_group("discriminator") == ParamGroup::kDiscriminator);
  CHECK_THROWS_AS(parse_param_group("decoder"), ValidationError);
  CHECK(parse_feature_kind("binary") == FeatureKind::kBinary);
}
