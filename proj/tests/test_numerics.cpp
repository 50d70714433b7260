#include <doctest.h>

#include <cmath>
#include <vector>

#include "cegan/numerics/adam.hpp"
#include "cegan/numerics/mlp.hpp"

using namespace cegan;

namespace {

MlpSpec small_spec(std::size_t in, std::vector<std::size_t> hidden, std::size_t out, Activation act,
                   double dropout = 0.0) {
  MlpSpec s;
  s.input_dim = in;
  s.hidden_dims = std::move(hidden);
  s.output_dim = out;
  s.output_activation = act;
  s.dropout_rate = dropout;
  return s;
}

void zero_weights(NetworkParams& p) {
  for (auto& l : p.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

// sum(upstream .* forward(params)) evaluated directly, for finite differences.
double probe_loss(const NetworkParams& p, const MlpSpec& s, const Matrix& in, const DropoutMasks& masks,
                  const Matrix& upstream) {
  return forward(p, s, in, masks).output.cwiseProduct(upstream).sum();
}

}  // namespace

TEST_CASE("xavier init: zero biases and zeroed Adam state") {
  Rng rng(3);
  const MlpSpec s = small_spec(7, {5, 4}, 2, Activation::kSigmoid);
  const NetworkParams p = xavier_init(s, rng);
  REQUIRE(p.layers.size() == 3);
  CHECK(p.adam_t == 0);
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    CHECK(p.layers[i].bias.isZero(0.0));
    CHECK(p.adam_m[i].weight.isZero(0.0));
    CHECK(p.adam_v[i].weight.isZero(0.0));
    CHECK(p.adam_m[i].bias.isZero(0.0));
  }
  CHECK(p.layers[0].weight.rows() == 7);
  CHECK(p.layers[0].weight.cols() == 5);
  CHECK(p.layers[2].weight.cols() == 2);
}

TEST_CASE("xavier init: 3x3 weights bounded by 1") {
  Rng rng(11);
  const MlpSpec s = small_spec(3, {3}, 3, Activation::kIdentity);
  for (int rep = 0; rep < 50; ++rep) {
    const NetworkParams p = xavier_init(s, rng);
    for (const auto& l : p.layers) CHECK(l.weight.cwiseAbs().maxCoeff() <= 1.0);
  }
}

TEST_CASE("xavier init: 100x100 weight variance matches the uniform law") {
  Rng rng(5);
  const MlpSpec s = small_spec(100, {100}, 1, Activation::kIdentity);
  const NetworkParams p = xavier_init(s, rng);
  const Matrix& w = p.layers[0].weight;
  REQUIRE(w.size() == 10000);
  const double mean = w.mean();
  const double var = (w.array() - mean).square().sum() / static_cast<double>(w.size() - 1);
  // Uniform on [-b, b] has variance b^2 / 3 = 2 / (n_in + n_out).
  const double expected = 2.0 / 200.0;
  CHECK(var == doctest::Approx(expected).epsilon(0.2));
  CHECK(std::abs(var - expected) / expected < 0.05);
}

TEST_CASE("forward: zero weights give zero identity output") {
  Rng rng(1);
  const MlpSpec s = small_spec(4, {6, 6}, 3, Activation::kIdentity);
  NetworkParams p = xavier_init(s, rng);
  zero_weights(p);
  const Matrix in = rng.normal_matrix(5, 4);
  const Matrix out = forward(p, s, in, DropoutMasks{}).output;
  CHECK(out.rows() == 5);
  CHECK(out.cols() == 3);
  CHECK(out.isZero(0.0));
}

TEST_CASE("forward: sigmoid of zero is one half") {
  Rng rng(1);
  const MlpSpec s = small_spec(1, {1}, 1, Activation::kSigmoid);
  NetworkParams p = xavier_init(s, rng);
  p.layers[0].weight(0, 0) = 1.0;
  p.layers[1].weight(0, 0) = 1.0;
  const Matrix in = Matrix::Zero(1, 1);
  CHECK(forward(p, s, in, DropoutMasks{}).output(0, 0) == 0.5);
}

TEST_CASE("forward: wrong input width is a shape error") {
  Rng rng(1);
  const MlpSpec s = small_spec(3, {2}, 1, Activation::kIdentity);
  const NetworkParams p = xavier_init(s, rng);
  CHECK_THROWS_AS(forward(p, s, Matrix::Zero(2, 4), DropoutMasks{}), ShapeError);
}

TEST_CASE("forward: inference mode ignores the rng and is deterministic") {
  Rng init(2);
  const MlpSpec s = small_spec(3, {8, 8}, 2, Activation::kIdentity, 0.6);
  const NetworkParams p = xavier_init(s, init);
  const Matrix in = init.normal_matrix(4, 3);
  Rng a(10), b(99);
  const Matrix oa = forward(p, s, in, false, a).output;
  const Matrix ob = forward(p, s, in, false, b).output;
  CHECK(oa == ob);
  CHECK(a.next_u64() == Rng(10).next_u64());
}

TEST_CASE("forward: same seed gives bit-identical training outputs and gradients") {
  Rng init(2);
  const MlpSpec s = small_spec(3, {8, 8}, 2, Activation::kSigmoid, 0.3);
  const NetworkParams p = xavier_init(s, init);
  const Matrix in = init.normal_matrix(4, 3);
  const Matrix up = init.normal_matrix(4, 2);
  Rng a(7), b(7);
  const Tape ta = forward(p, s, in, true, a);
  const Tape tb = forward(p, s, in, true, b);
  CHECK(ta.output == tb.output);
  const BackwardResult ga = backward(ta, up);
  const BackwardResult gb = backward(tb, up);
  for (std::size_t l = 0; l < ga.params.layers.size(); ++l) {
    CHECK(ga.params.layers[l].weight == gb.params.layers[l].weight);
  }
}

TEST_CASE("inverted dropout preserves the expected hidden activation") {
  Rng init(4);
  const std::size_t width = 8;
  MlpSpec s = small_spec(3, {width}, width, Activation::kIdentity, 0.6);
  NetworkParams p = xavier_init(s, init);
  p.layers[0].bias.setConstant(0.5);
  // Identity output layer exposes the masked hidden activation directly.
  p.layers[1].weight = Matrix::Identity(width, width);
  const Matrix in = init.normal_matrix(1, 3);
  const Matrix clean = forward(p, s, in, DropoutMasks{}).output;

  Rng masks(8);
  const int draws = 100000;
  Matrix sum = Matrix::Zero(1, width);
  for (int i = 0; i < draws; ++i) sum += forward(p, s, in, true, masks).output;
  const Matrix avg = sum / draws;
  for (Eigen::Index c = 0; c < clean.cols(); ++c) {
    if (clean(0, c) == 0.0) {
      CHECK(avg(0, c) == 0.0);
    } else {
      CHECK(std::abs(avg(0, c) - clean(0, c)) <= 0.02 * std::abs(clean(0, c)));
    }
  }
}

TEST_CASE("dropout masks take values 0 or 1/(1-d)") {
  const MlpSpec s = small_spec(2, {16, 4}, 1, Activation::kIdentity, 0.25);
  Rng rng(9);
  const DropoutMasks m = draw_dropout_masks(s, 10, rng);
  REQUIRE(m.size() == 2);
  for (const auto& mask : m) {
    for (Eigen::Index i = 0; i < mask.size(); ++i) {
      const double v = mask.data()[i];
      CHECK((v == 0.0 || v == doctest::Approx(1.0 / 0.75)));
    }
  }
  CHECK(draw_dropout_masks(small_spec(2, {3}, 1, Activation::kIdentity, 0.0), 4, rng).empty());
}

TEST_CASE("backward: zero upstream gives zero parameter gradients") {
  Rng rng(6);
  const MlpSpec s = small_spec(3, {5, 5}, 2, Activation::kSigmoid);
  const NetworkParams p = xavier_init(s, rng);
  const Tape t = forward(p, s, rng.normal_matrix(4, 3), DropoutMasks{});
  const BackwardResult g = backward(t, Matrix::Zero(4, 2));
  CHECK(g.params.squared_norm() == 0.0);
  CHECK(g.input.isZero(0.0));
}

TEST_CASE("backward: d sigmoid(w h + b) / dw at zero is 0.25") {
  Rng rng(1);
  const MlpSpec s = small_spec(1, {1}, 1, Activation::kSigmoid);
  NetworkParams p = xavier_init(s, rng);
  zero_weights(p);
  p.layers[0].weight(0, 0) = 1.0;  // hidden unit passes x = 1 through the ReLU
  const Tape t = forward(p, s, Matrix::Ones(1, 1), DropoutMasks{});
  const BackwardResult g = backward(t, Matrix::Ones(1, 1));
  CHECK(g.params.layers[1].weight(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.params.layers[1].bias(0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("backward matches central finite differences") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(100 + seed);
    MlpSpec s = small_spec(4, {6, 5}, 3, Activation::kIdentity, 0.3);
    s.output_column_activations = {Activation::kSigmoid, Activation::kIdentity, Activation::kSigmoid};
    NetworkParams p = xavier_init(s, rng);
    for (auto& l : p.layers) {
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.1 * rng.normal();
    }
    const Matrix in = rng.normal_matrix(6, 4);
    const Matrix up = rng.normal_matrix(6, 3);
    const DropoutMasks masks = draw_dropout_masks(s, 6, rng);
    const BackwardResult g = backward(forward(p, s, in, masks), up);

    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      auto check_entry = [&](double& value, double analytic) {
        const double saved = value;
        value = saved + h;
        const double plus = probe_loss(p, s, in, masks, up);
        value = saved - h;
        const double minus = probe_loss(p, s, in, masks, up);
        value = saved;
        const double numeric = (plus - minus) / (2 * h);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
      };
      for (Eigen::Index i = 0; i < p.layers[l].weight.size(); ++i) {
        check_entry(p.layers[l].weight.data()[i], g.params.layers[l].weight.data()[i]);
      }
      for (Eigen::Index i = 0; i < p.layers[l].bias.size(); ++i) {
        check_entry(p.layers[l].bias(i), g.params.layers[l].bias(i));
      }
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("backward rejects stale and mismatched tapes") {
  Rng rng(6);
  const MlpSpec s = small_spec(3, {5}, 2, Activation::kIdentity);
  NetworkParams p = xavier_init(s, rng);
  const Tape t = forward(p, s, rng.normal_matrix(4, 3), DropoutMasks{});
  CHECK_THROWS_AS(backward(t, Matrix::Zero(4, 3)), ShapeError);
  adam_step(p, NetworkGradients::zeros_like(p), AdamConfig{});
  CHECK_THROWS_AS(backward(t, Matrix::Zero(4, 2)), ShapeError);
  CHECK_THROWS_AS(backward(Tape{}, Matrix::Zero(4, 2)), ShapeError);
}

TEST_CASE("adam: zero gradients from zeroed state leave parameters unchanged") {
  Rng rng(6);
  const MlpSpec s = small_spec(3, {5}, 2, Activation::kIdentity);
  NetworkParams p = xavier_init(s, rng);
  const NetworkParams before = p;
  adam_step(p, NetworkGradients::zeros_like(p), AdamConfig{});
  CHECK(p.adam_t == 1);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    CHECK(p.layers[l].weight == before.layers[l].weight);
    CHECK(p.layers[l].bias == before.layers[l].bias);
  }
}

namespace {

NetworkParams scalar_param(double theta) {
  NetworkParams p;
  p.layers.push_back({Matrix::Constant(1, 1, theta), RowVector::Zero(1)});
  p.adam_m.push_back({Matrix::Zero(1, 1), RowVector::Zero(1)});
  p.adam_v.push_back({Matrix::Zero(1, 1), RowVector::Zero(1)});
  return p;
}

NetworkGradients scalar_grad(double g) {
  NetworkGradients out;
  out.layers.push_back({Matrix::Constant(1, 1, g), RowVector::Zero(1)});
  return out;
}

}  // namespace

TEST_CASE("adam: one step from theta = 0 with g = 1") {
  NetworkParams p = scalar_param(0.0);
  AdamConfig c;
  adam_step(p, scalar_grad(1.0), c);
  // m = 0.1, v = 0.001; bias-corrected both become 1.
  const double m_hat = 0.1 / (1 - 0.9);
  const double v_hat = 0.001 / (1 - 0.999);
  const double expected = -1e-4 * m_hat / (std::sqrt(v_hat) + 1e-8);
  CHECK(p.layers[0].weight(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(p.layers[0].weight(0, 0) == doctest::Approx(-9.99999e-5).epsilon(1e-6));
}

TEST_CASE("adam: constant unit gradient gives steps of size lr in the limit") {
  NetworkParams p = scalar_param(0.0);
  AdamConfig c;
  c.learning_rate = 1e-3;
  double prev = 0.0, step = 0.0;
  for (int i = 0; i < 20000; ++i) {
    adam_step(p, scalar_grad(1.0), c);
    step = std::abs(p.layers[0].weight(0, 0) - prev);
    prev = p.layers[0].weight(0, 0);
  }
  CHECK(step == doctest::Approx(c.learning_rate).epsilon(1e-6));
}

TEST_CASE("adam: non-finite gradients are rejected without touching params") {
  NetworkParams p = scalar_param(0.5);
  CHECK_THROWS_AS(adam_step(p, scalar_grad(std::nan("")), AdamConfig{}), DivergenceError);
  CHECK_THROWS_AS(adam_step(p, scalar_grad(INFINITY), AdamConfig{}), DivergenceError);
  CHECK(p.layers[0].weight(0, 0) == 0.5);
  CHECK(p.adam_t == 0);
}

TEST_CASE("adam config validation") {
  AdamConfig c;
  CHECK_NOTHROW(c.validate());
  c.beta1 = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.epsilon = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.learning_rate = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("mlp spec validation") {
  MlpSpec s = small_spec(2, {}, 1, Activation::kIdentity);
  CHECK_THROWS_AS(s.validate(), ShapeError);
  s = small_spec(2, {3}, 1, Activation::kIdentity, 1.0);
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = small_spec(2, {3}, 2, Activation::kIdentity);
  s.output_column_activations = {Activation::kSigmoid};
  CHECK_THROWS_AS(s.validate(), ShapeError);
}

TEST_CASE("rng: identical seeds give identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
  Rng c(42), d(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(c.normal() == d.normal());
}

TEST_CASE("rng: children depend only on (key, index)") {
  Rng a(42);
  const Rng c0 = a.child(3);
  for (int i = 0; i < 50; ++i) a.next_u64();
  CHECK(a.child(3).key() == c0.key());
  CHECK(a.child(3).key() != a.child(4).key());
  CHECK(Rng(42).child(0).key() != Rng(43).child(0).key());
}

TEST_CASE("rng: sibling streams are uncorrelated") {
  const Rng root(1234);
  Rng a = root.child(0), b = root.child(1);
  const int n = 200000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.normal(), y = b.normal();
    sa += x;
    sb += y;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  const double corr = (sab / n - sa / n * sb / n) /
                      std::sqrt((saa / n - sa / n * sa / n) * (sbb / n - sb / n * sb / n));
  CHECK(std::abs(corr) < 0.01);
  CHECK(std::abs(sa / n) < 0.01);
  CHECK(saa / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("rng: uniform and index ranges") {
  Rng r(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(r.index(7) < 7);
  }
}

TEST_CASE("matrix helpers") {
  CHECK(clamp_probability(0.0) == kProbabilityFloor);
  CHECK(clamp_probability(1.0) == 1.0 - kProbabilityFloor);
  CHECK(clamp_probability(0.3) == 0.3);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) == 1.0);
  const Matrix a = Matrix::Ones(2, 1), b = Matrix::Zero(2, 3);
  const Matrix c = hconcat({&a, &b});
  CHECK(c.cols() == 4);
  CHECK(c(1, 0) == 1.0);
  const Matrix wrong = Matrix::Zero(3, 1);
  CHECK_THROWS_AS(hconcat({&a, &wrong}), ShapeError);
  CHECK_THROWS_AS(require_shape(a, 2, 2, "a"), ShapeError);
}
