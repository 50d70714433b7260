#include "cegan/datagen/generators.hpp"

#include <algorithm>
#include <cmath>

#include "cegan/numerics/rng.hpp"

namespace cegan {
namespace {

// Marsaglia-Tsang gamma variate with unit scale.
double gamma_variate(Rng& rng, double shape) {
  if (shape < 1.0) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    return gamma_variate(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double beta_variate(Rng& rng, double a, double b) {
  const double ga = gamma_variate(rng, a);
  const double gb = gamma_variate(rng, b);
  return ga / (ga + gb);
}

}  // namespace

void ToyGenConfig::validate() const {
  if (n == 0) throw ValidationError("toy.n must be >= 1");
  if (dim == 0) throw ValidationError("toy.dim must be >= 1");
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw ValidationError("toy.zeta must be a finite value >= 0");
}

Dataset generate_toy(const ToyGenConfig& config) {
  config.validate();
  const Rng root(config.seed);
  // Separate streams so that, for one seed, changing zeta changes only the proxy noise.
  Rng latent_rng = root.child(0);
  Rng noise_rng = root.child(1);
  Rng treatment_rng = root.child(2);

  const std::size_t n = config.n;
  const std::size_t d = config.dim;
  Dataset ds;
  ds.schema = DataSchema::uniform(d, FeatureKind::kContinuous, 1, FeatureKind::kContinuous);
  Matrix z(n, d);
  ds.x.resize(n, d);
  ds.t.resize(n);
  ds.y.resize(n, 1);
  Matrix y0(n, 1);
  Matrix y1(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = latent_rng.bernoulli(0.5) ? 1.0 : 0.0;
    for (std::size_t j = 0; j < d; ++j) z(i, j) = latent_rng.normal(3.0 * (mu - 1.0), 1.0);
    for (std::size_t j = 0; j < d; ++j) {
      const double noise = noise_rng.normal();
      ds.x(i, j) = config.zeta == 0.0 ? z(i, j) : z(i, j) + config.zeta * noise;
    }
    ds.t(i) = treatment_rng.bernoulli(sigmoid(0.25 * z(i, d - 1))) ? 1.0 : 0.0;
    const double s = z.row(i).sum();
    y0(i, 0) = sigmoid(s - 1.0);
    y1(i, 0) = sigmoid(s + 1.0);
    ds.y(i, 0) = ds.t(i) == 1.0 ? y1(i, 0) : y0(i, 0);
  }
  ds.y0 = std::move(y0);
  ds.y1 = std::move(y1);
  ds.z_true = std::move(z);
  ds.validate();
  return ds;
}

std::string to_string(ProxyScheme scheme) {
  return scheme == ProxyScheme::kGestatScalar ? "gestat-scalar" : "gestat10-onehot";
}

ProxyScheme parse_proxy_scheme(const std::string& name) {
  if (name == "gestat-scalar") return ProxyScheme::kGestatScalar;
  if (name == "gestat10-onehot") return ProxyScheme::kGestat10OneHot;
  throw ValidationError("unknown proxy scheme '" + name + "'");
}

void TwinsLikeConfig::validate() const {
  if (n < 2) throw ValidationError("twins_like.n must be >= 2");
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
    throw ValidationError("twins_like.flip_probability must lie in [0, 1]");
  }
  if (replicas == 0) throw ValidationError("twins_like.replicas must be >= 1");
  if (!(w_std >= 0.0) || !(w_o_variance >= 0.0) || !(w_h_variance >= 0.0)) {
    throw ValidationError("twins_like: weight spreads must be >= 0");
  }
  if (!(gestation_beta_a > 0.0 && gestation_beta_b > 0.0)) {
    throw ValidationError("twins_like: gestation beta parameters must be > 0");
  }
  if (base_features == 0 && scheme == ProxyScheme::kGestatScalar && latent_confounding) {
    throw ValidationError("twins_like: no observed features would remain");
  }
}

TwinsLikeDraw generate_twins_like_detailed(const TwinsLikeConfig& config) {
  config.validate();
  constexpr int kCategories = 10;
  const Rng root(config.seed);
  Rng gestation_rng = root.child(0);
  Rng feature_rng = root.child(1);
  Rng weight_rng = root.child(2);
  Rng proxy_rng = root.child(3);
  Rng treatment_rng = root.child(4);
  Rng outcome_rng = root.child(5);

  const std::size_t n = config.n;
  TwinsLikeDraw draw;

  Vector raw(n);
  for (std::size_t i = 0; i < n; ++i) raw(i) = beta_variate(gestation_rng, config.gestation_beta_a, config.gestation_beta_b);
  draw.gestation = minmax_normalize(raw);
  draw.category.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    draw.category[i] = std::min(kCategories - 1, static_cast<int>(std::floor(kCategories * draw.gestation(i))));
  }

  // Base features: noisy views of gestation with random loadings.
  const std::size_t nb = config.base_features;
  Matrix base(n, nb);
  std::vector<FeatureKind> kinds;
  for (std::size_t j = 0; j < nb; ++j) {
    const double loading = feature_rng.normal(0.0, 2.0);
    const double offset = feature_rng.normal(0.0, 0.5);
    const bool binary = j % 2 == 1;
    kinds.push_back(binary ? FeatureKind::kBinary : FeatureKind::kContinuous);
    for (std::size_t i = 0; i < n; ++i) {
      const double signal = loading * (draw.gestation(i) - 0.5) + offset;
      base(i, j) = binary ? (feature_rng.bernoulli(sigmoid(signal)) ? 1.0 : 0.0) : signal + feature_rng.normal();
    }
  }

  std::vector<const Matrix*> blocks{&base};
  Matrix gestation_column(n, 1);
  gestation_column.col(0) = draw.gestation;
  Matrix true_onehot = Matrix::Zero(n, kCategories);
  for (std::size_t i = 0; i < n; ++i) true_onehot(i, draw.category[i]) = 1.0;

  if (config.scheme == ProxyScheme::kGestatScalar) {
    if (!config.latent_confounding) {
      blocks.push_back(&gestation_column);
      kinds.push_back(FeatureKind::kContinuous);
    }
  } else {
    for (std::size_t r = 0; r < config.replicas; ++r) {
      Matrix replica = true_onehot;
      for (Eigen::Index k = 0; k < replica.size(); ++k) {
        if (proxy_rng.bernoulli(config.flip_probability)) replica.data()[k] = 1.0 - replica.data()[k];
      }
      draw.replicas.push_back(std::move(replica));
    }
    for (const Matrix& r : draw.replicas) {
      blocks.push_back(&r);
      kinds.insert(kinds.end(), kCategories, FeatureKind::kBinary);
    }
    if (!config.latent_confounding) {
      blocks.push_back(&true_onehot);
      kinds.insert(kinds.end(), kCategories, FeatureKind::kBinary);
    }
  }

  Dataset& ds = draw.data;
  ds.schema = DataSchema{kinds, {FeatureKind::kBinary}};
  ds.x.resize(n, static_cast<Eigen::Index>(kinds.size()));
  Eigen::Index at = 0;
  for (const Matrix* b : blocks) {
    ds.x.middleCols(at, b->cols()) = *b;
    at += b->cols();
  }

  ds.t.resize(n);
  if (config.scheme == ProxyScheme::kGestatScalar) {
    draw.w = weight_rng.normal(config.w_mean, config.w_std);
    for (std::size_t i = 0; i < n; ++i) {
      ds.t(i) = treatment_rng.bernoulli(sigmoid(draw.w * draw.gestation(i))) ? 1.0 : 0.0;
    }
  } else {
    draw.w_o.resize(ds.x.cols());
    const double sd_o = std::sqrt(config.w_o_variance);
    for (Eigen::Index j = 0; j < draw.w_o.size(); ++j) draw.w_o(j) = weight_rng.normal(0.0, sd_o);
    draw.w_h = weight_rng.normal(config.w_h_mean, std::sqrt(config.w_h_variance));
    for (std::size_t i = 0; i < n; ++i) {
      const double logit = ds.x.row(i).dot(draw.w_o) + draw.w_h * (draw.category[i] / 10.0 - 0.1);
      ds.t(i) = treatment_rng.bernoulli(sigmoid(logit)) ? 1.0 : 0.0;
    }
  }

  ds.y.resize(n, 1);
  Matrix y0(n, 1);
  Matrix y1(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = draw.gestation(i);
    y0(i, 0) = outcome_rng.bernoulli(sigmoid(config.outcome_slope * g + config.outcome_bias0)) ? 1.0 : 0.0;
    y1(i, 0) = outcome_rng.bernoulli(sigmoid(config.outcome_slope * g + config.outcome_bias1)) ? 1.0 : 0.0;
    ds.y(i, 0) = ds.t(i) == 1.0 ? y1(i, 0) : y0(i, 0);
  }
  ds.y0 = std::move(y0);
  ds.y1 = std::move(y1);
  Matrix z(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    z(i, 0) = draw.gestation(i);
    z(i, 1) = draw.category[i];
  }
  ds.z_true = std::move(z);
  ds.validate();
  return draw;
}

Dataset generate_twins_like(const TwinsLikeConfig& config) { return generate_twins_like_detailed(config).data; }

}  // namespace cegan
