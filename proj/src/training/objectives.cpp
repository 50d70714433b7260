#include "cegan/training/objectives.hpp"

#include <cmath>

namespace cegan {
namespace {

double mean(const Vector& v) { return v.size() == 0 ? 0.0 : v.mean(); }

// Forward passes shared by the adversarial objectives.
struct AdversarialPass {
  Tape encoder;
  Tape inference;
  Tape predictor;
  Tape disc_encoder;
  Tape disc_decoder;
};

Matrix corrupted_encoder_input(const CeganModel& model, const Batch& b, const StepDraws& d) {
  Matrix in = encoder_input(model, b.x, b.t, b.y, d.eps_encoder);
  if (d.corruption.size() > 0) in.leftCols(d.corruption.cols()) += d.corruption;
  return in;
}

AdversarialPass run_adversarial(const CeganModel& model, const Batch& b, const StepDraws& d) {
  AdversarialPass p;
  p.encoder = forward(model.encoder.params, model.encoder.spec, corrupted_encoder_input(model, b, d), d.encoder);
  p.inference = forward(model.inference.params, model.inference.spec,
                        inference_input(model, b.x, b.t, d.eps_inference), d.inference);
  p.predictor = forward(model.predictor.params, model.predictor.spec,
                        predictor_input(model, p.inference.output, b.x, b.t, d.eps_predictor), d.predictor);
  p.disc_encoder = forward(model.discriminator.params, model.discriminator.spec,
                           discriminator_input(model, p.encoder.output, b.x, b.t, b.y), d.disc_encoder_tuple);
  p.disc_decoder = forward(model.discriminator.params, model.discriminator.spec,
                           discriminator_input(model, p.inference.output, b.x, b.t, p.predictor.output),
                           d.disc_decoder_tuple);
  return p;
}

// d/dp of log(clamp(p)), zero where the clamp is active.
double dlog(double p) {
  return (p < kProbabilityFloor || p > 1.0 - kProbabilityFloor) ? 0.0 : 1.0 / p;
}
double dlog1m(double p) {
  return (p < kProbabilityFloor || p > 1.0 - kProbabilityFloor) ? 0.0 : -1.0 / (1.0 - p);
}

}  // namespace

Batch make_batch(const Dataset& data, std::span<const std::size_t> rows) {
  Batch b{Matrix(rows.size(), data.x.cols()), Vector(rows.size()), Matrix(rows.size(), data.y.cols())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    b.x.row(i) = data.x.row(rows[i]);
    b.t(i) = data.t(rows[i]);
    b.y.row(i) = data.y.row(rows[i]);
  }
  return b;
}

Batch full_batch(const Dataset& data) { return Batch{data.x, data.t, data.y}; }

Batch sample_batch(const Dataset& data, std::size_t k, Rng& rng) {
  std::vector<std::size_t> rows(k);
  for (auto& r : rows) r = rng.index(data.size());
  return make_batch(data, rows);
}

StepDraws draw_step(const CeganModel& model, std::size_t rows, Rng& rng, StepKind kind, bool training) {
  const ModelConfig& c = model.config;
  const bool all = kind == StepKind::kAll;
  const bool uses_encoder = all || kind == StepKind::kReconstruction || kind == StepKind::kAdversarial;
  const bool uses_decoder = all || kind == StepKind::kAdversarial || kind == StepKind::kPrediction;
  StepDraws d;
  if (uses_encoder) {
    d.eps_encoder = rng.normal_matrix(rows, c.encoder_noise_dim);
    if (c.input_corruption_std > 0.0) {
      d.corruption = c.input_corruption_std * rng.normal_matrix(rows, model.schema.x_dim() + 1 + model.schema.y_dim());
    }
  }
  if (uses_decoder) {
    d.eps_inference = rng.normal_matrix(rows, c.inference_noise_dim);
    d.eps_predictor = rng.normal_matrix(rows, c.predictor_noise_dim);
  }
  if (!training) return d;
  if (uses_encoder) d.encoder = draw_dropout_masks(model.encoder.spec, rows, rng);
  if (uses_decoder) {
    d.inference = draw_dropout_masks(model.inference.spec, rows, rng);
    d.predictor = draw_dropout_masks(model.predictor.spec, rows, rng);
  }
  if (all || kind == StepKind::kReconstruction) {
    d.reconstructor = draw_dropout_masks(model.reconstructor.spec, rows, rng);
  }
  if (all || kind == StepKind::kAdversarial) {
    d.disc_encoder_tuple = draw_dropout_masks(model.discriminator.spec, rows, rng);
    d.disc_decoder_tuple = draw_dropout_masks(model.discriminator.spec, rows, rng);
  }
  if (all || kind == StepKind::kPropensity) d.propensity = draw_dropout_masks(model.propensity.spec, rows, rng);
  return d;
}

ObjectiveValue reconstruction_objective(const CeganModel& model, const Batch& b, const StepDraws& d) {
  const double n = static_cast<double>(b.size());
  const Tape enc = forward(model.encoder.params, model.encoder.spec, corrupted_encoder_input(model, b, d), d.encoder);
  const Tape rec = forward(model.reconstructor.params, model.reconstructor.spec, enc.output, d.reconstructor);

  const Matrix target = [&] {
    const Matrix tc = as_column(b.t);
    const Matrix xs = scaled_x(model, b.x);
    return hconcat({&xs, &tc, &b.y});
  }();
  std::vector<FeatureKind> kinds = model.schema.x_kinds;
  kinds.push_back(FeatureKind::kBinary);
  kinds.insert(kinds.end(), model.schema.y_kinds.begin(), model.schema.y_kinds.end());
  const RowLoss loss = row_loss(target, rec.output, kinds);

  ObjectiveValue out;
  out.loss = mean(loss.per_row);
  BackwardResult rec_grad = backward(rec, loss.gradient / n);
  BackwardResult enc_grad = backward(enc, rec_grad.input);
  out.gradients[ParamGroup::kReconstructor] = std::move(rec_grad.params);
  out.gradients[ParamGroup::kEncoder] = std::move(enc_grad.params);
  return out;
}

ObjectiveValue discriminator_objective(const CeganModel& model, const Batch& b, const StepDraws& d) {
  const double n = static_cast<double>(b.size());
  const AdversarialPass p = run_adversarial(model, b, d);
  const Vector p_enc = p.disc_encoder.output.col(0);
  const Vector p_dec = p.disc_decoder.output.col(0);

  ObjectiveValue out;
  out.loss = -mean(value_from_probabilities(p_enc, p_dec));
  Matrix up_enc(b.size(), 1);
  Matrix up_dec(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) {
    up_enc(i, 0) = -dlog(p_enc(i)) / n;
    up_dec(i, 0) = -dlog1m(p_dec(i)) / n;
  }
  NetworkGradients g = backward(p.disc_encoder, up_enc).params;
  g += backward(p.disc_decoder, up_dec).params;
  out.gradients[ParamGroup::kDiscriminator] = std::move(g);
  return out;
}

ObjectiveValue generator_objective(const CeganModel& model, const Batch& b, const StepDraws& d, double alpha,
                                   GeneratorLoss mode) {
  const double n = static_cast<double>(b.size());
  const Eigen::Index dz = static_cast<Eigen::Index>(model.config.latent_dim);
  const Eigen::Index dy = static_cast<Eigen::Index>(model.schema.y_dim());

  const AdversarialPass p = run_adversarial(model, b, d);
  const Vector p_enc = p.disc_encoder.output.col(0);
  const Vector p_dec = p.disc_decoder.output.col(0);
  const RowLoss lp = row_loss(b.y, p.predictor.output, model.schema.y_kinds);

  double adversarial = 0.0;
  Matrix up_enc(b.size(), 1);
  Matrix up_dec(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double pe = clamp_probability(p_enc(i));
    const double pd = clamp_probability(p_dec(i));
    adversarial += std::log(pe);
    up_enc(i, 0) = dlog(p_enc(i)) / n;
    if (mode == GeneratorLoss::kSaturating) {
      adversarial += std::log(1.0 - pd);
      up_dec(i, 0) = dlog1m(p_dec(i)) / n;
    } else {
      adversarial -= std::log(pd);
      up_dec(i, 0) = -dlog(p_dec(i)) / n;
    }
  }

  ObjectiveValue out;
  out.loss = adversarial / n + alpha * mean(lp.per_row);

  // Encoder: through the z block of the encoder-tuple discriminator input.
  const BackwardResult d_enc = backward(p.disc_encoder, up_enc);
  out.gradients[ParamGroup::kEncoder] = backward(p.encoder, d_enc.input.leftCols(dz)).params;

  // Decoder tuple (z, x, t, y_hat): z feeds f_P as well, y_hat comes from f_P.
  const BackwardResult d_dec = backward(p.disc_decoder, up_dec);
  const Matrix dy_hat = d_dec.input.rightCols(dy) + (alpha / n) * lp.gradient;
  const BackwardResult pred = backward(p.predictor, dy_hat);
  const Matrix dz_total = d_dec.input.leftCols(dz) + pred.input.leftCols(dz);
  out.gradients[ParamGroup::kPredictor] = pred.params;
  out.gradients[ParamGroup::kInference] = backward(p.inference, dz_total).params;
  return out;
}

ObjectiveValue prediction_objective(const CeganModel& model, const Batch& b, const StepDraws& d) {
  const double n = static_cast<double>(b.size());
  const Eigen::Index dz = static_cast<Eigen::Index>(model.config.latent_dim);
  const Tape inf = forward(model.inference.params, model.inference.spec,
                           inference_input(model, b.x, b.t, d.eps_inference), d.inference);
  const Tape pred = forward(model.predictor.params, model.predictor.spec,
                            predictor_input(model, inf.output, b.x, b.t, d.eps_predictor), d.predictor);
  const RowLoss lp = row_loss(b.y, pred.output, model.schema.y_kinds);

  ObjectiveValue out;
  out.loss = mean(lp.per_row);
  const BackwardResult pg = backward(pred, lp.gradient / n);
  out.gradients[ParamGroup::kPredictor] = pg.params;
  out.gradients[ParamGroup::kInference] = backward(inf, pg.input.leftCols(dz)).params;
  return out;
}

ObjectiveValue propensity_objective(const CeganModel& model, const Batch& b, const StepDraws& d) {
  const double n = static_cast<double>(b.size());
  const Tape q = forward(model.propensity.params, model.propensity.spec, scaled_x(model, b.x), d.propensity);
  const FeatureKind kind[] = {FeatureKind::kBinary};
  const RowLoss loss = row_loss(as_column(b.t), q.output, kind);
  ObjectiveValue out;
  out.loss = mean(loss.per_row);
  out.gradients[ParamGroup::kPropensity] = backward(q, loss.gradient / n).params;
  return out;
}

}  // namespace cegan
