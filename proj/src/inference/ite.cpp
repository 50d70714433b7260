#include "cegan/inference/ite.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace cegan {
namespace {

constexpr Eigen::Index kChunkSubjects = 128;

// Per-(subject, sample) random inputs, rows ordered subject-major.
struct McDraws {
  Matrix x;
  Vector q;           // propensity of the row's subject
  Vector t_tilde;
  Matrix eps_inference;
  Matrix eps_inference_alt;  // weighted-sum mode: draw for the t=1 component
  Matrix eps_predictor;
};

McDraws draw_block(const CeganModel& model, const Matrix& x, const Vector& q, std::vector<Rng>& streams,
                   const IteConfig& config) {
  const Eigen::Index n = x.rows();
  const Eigen::Index m = static_cast<Eigen::Index>(config.mc_samples);
  const std::size_t di = model.config.inference_noise_dim;
  const std::size_t dp = model.config.predictor_noise_dim;
  const bool weighted = config.z_mode == ZMode::kWeightedSum;
  McDraws d;
  d.x.resize(n * m, x.cols());
  d.q.resize(n * m);
  d.t_tilde.resize(n * m);
  d.eps_inference.resize(n * m, di);
  if (weighted) d.eps_inference_alt.resize(n * m, di);
  d.eps_predictor.resize(n * m, dp);
  for (Eigen::Index i = 0; i < n; ++i) {
    Rng& rng = streams[i];
    for (Eigen::Index s = 0; s < m; ++s) {
      const Eigen::Index row = i * m + s;
      d.x.row(row) = x.row(i);
      d.q(row) = q(i);
      d.t_tilde(row) = rng.uniform() < q(i) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < di; ++k) d.eps_inference(row, k) = rng.normal();
      if (weighted) {
        for (std::size_t k = 0; k < di; ++k) d.eps_inference_alt(row, k) = rng.normal();
      }
      for (std::size_t k = 0; k < dp; ++k) d.eps_predictor(row, k) = rng.normal();
    }
  }
  return d;
}

Matrix f_inference(const CeganModel& model, const Matrix& x, const Vector& t, const Matrix& eps) {
  return predict(model.inference, inference_input(model, x, t, eps));
}

Matrix f_predictor(const CeganModel& model, const Matrix& z, const Matrix& x, const Vector& t, const Matrix& eps) {
  return predict(model.predictor, predictor_input(model, z, x, t, eps));
}

// Per-row outcome under do(t) for a block of draws.
Matrix outcome_rows(const CeganModel& model, const McDraws& d, int do_t, const IteConfig& config) {
  const Vector t_do = Vector::Constant(d.x.rows(), static_cast<double>(do_t));
  if (config.z_mode == ZMode::kSampleT) {
    const Matrix z = f_inference(model, d.x, d.t_tilde, d.eps_inference);
    return f_predictor(model, z, d.x, t_do, d.eps_predictor);
  }
  const Matrix z0 = f_inference(model, d.x, Vector::Zero(d.x.rows()), d.eps_inference);
  const Matrix z1 = f_inference(model, d.x, Vector::Ones(d.x.rows()), d.eps_inference_alt);
  const Matrix y_from0 = f_predictor(model, z0, d.x, t_do, d.eps_predictor);
  const Matrix y_from1 = f_predictor(model, z1, d.x, t_do, d.eps_predictor);
  Matrix out(y_from0.rows(), y_from0.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    out.row(r) = d.q(r) * y_from1.row(r) + (1.0 - d.q(r)) * y_from0.row(r);
  }
  return out;
}

Matrix average_samples(const Matrix& rows, Eigen::Index subjects, Eigen::Index samples) {
  Matrix out = Matrix::Zero(subjects, rows.cols());
  for (Eigen::Index i = 0; i < subjects; ++i) {
    out.row(i) = rows.middleRows(i * samples, samples).colwise().sum() / static_cast<double>(samples);
  }
  return out;
}

std::vector<Rng> subject_streams(const IteConfig& config, Eigen::Index first, Eigen::Index count) {
  const Rng root(config.seed);
  std::vector<Rng> streams;
  streams.reserve(count);
  for (Eigen::Index i = 0; i < count; ++i) streams.push_back(root.child(static_cast<std::uint64_t>(first + i)));
  return streams;
}

// Both potential-outcome estimates, chunked over subjects.
void estimate_both(const CeganModel& model, const Matrix& x, const IteConfig& config, Matrix* y1, Matrix* y0) {
  config.validate();
  require_shape(x, x.rows(), model.schema.x_dim(), "ite x");
  const Eigen::Index n = x.rows();
  const Eigen::Index m = static_cast<Eigen::Index>(config.mc_samples);
  const Vector q = propensity(model, x);
  *y1 = Matrix(n, model.schema.y_dim());
  *y0 = Matrix(n, model.schema.y_dim());
  for (Eigen::Index start = 0; start < n; start += kChunkSubjects) {
    const Eigen::Index count = std::min(kChunkSubjects, n - start);
    const Matrix xc = x.middleRows(start, count);
    const Vector qc = q.segment(start, count);
    std::vector<Rng> streams = subject_streams(config, start, count);
    const McDraws first = draw_block(model, xc, qc, streams, config);
    y1->middleRows(start, count) = average_samples(outcome_rows(model, first, 1, config), count, m);
    if (config.paired) {
      y0->middleRows(start, count) = average_samples(outcome_rows(model, first, 0, config), count, m);
    } else {
      const McDraws second = draw_block(model, xc, qc, streams, config);
      y0->middleRows(start, count) = average_samples(outcome_rows(model, second, 0, config), count, m);
    }
  }
}

}  // namespace

std::string to_string(ZMode mode) { return mode == ZMode::kSampleT ? "sample-t" : "weighted-sum"; }

ZMode parse_z_mode(const std::string& name) {
  if (name == "sample-t") return ZMode::kSampleT;
  if (name == "weighted-sum") return ZMode::kWeightedSum;
  throw ValidationError("unknown z mode '" + name + "'");
}

void IteConfig::validate() const {
  if (mc_samples == 0) throw ValidationError("inference: mc_samples must be >= 1");
}

Matrix estimate_outcome(const CeganModel& model, const Matrix& x, int do_t, const IteConfig& config) {
  if (do_t != 0 && do_t != 1) throw ValidationError("estimate_outcome: do_t must be 0 or 1");
  Matrix y1;
  Matrix y0;
  estimate_both(model, x, config, &y1, &y0);
  return do_t == 1 ? y1 : y0;
}

ItEstimate estimate_ite(const CeganModel& model, const Matrix& x, const IteConfig& config) {
  ItEstimate e;
  estimate_both(model, x, config, &e.y1_hat, &e.y0_hat);
  e.ite = e.y1_hat - e.y0_hat;
  return e;
}

IntermediateDiagnostics intermediate_diagnostics(const CeganModel& model, const Matrix& x, const Vector& t_star,
                                                 const IteConfig& config) {
  config.validate();
  require_shape(x, t_star.size(), model.schema.x_dim(), "diagnostics x");
  const Eigen::Index n = x.rows();
  const Eigen::Index m = static_cast<Eigen::Index>(config.mc_samples);
  const Vector q = propensity(model, x);
  IntermediateDiagnostics out{Vector(n), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = clamp_probability(q(i));
    out.treatment_xent(i) = -t_star(i) * std::log(p) - (1.0 - t_star(i)) * std::log(1.0 - p);
  }
  IteConfig sample_t = config;
  sample_t.z_mode = ZMode::kSampleT;
  for (Eigen::Index start = 0; start < n; start += kChunkSubjects) {
    const Eigen::Index count = std::min(kChunkSubjects, n - start);
    const Matrix xc = x.middleRows(start, count);
    std::vector<Rng> streams = subject_streams(config, start, count);
    const McDraws d = draw_block(model, xc, q.segment(start, count), streams, sample_t);
    Vector t_rows(d.x.rows());
    for (Eigen::Index r = 0; r < t_rows.size(); ++r) t_rows(r) = t_star(start + r / m);
    const Matrix y_dot = f_predictor(model, f_inference(model, d.x, t_rows, d.eps_inference), d.x, t_rows,
                                     d.eps_predictor);
    const Matrix y_tilde = f_predictor(model, f_inference(model, d.x, d.t_tilde, d.eps_inference), d.x, d.t_tilde,
                                       d.eps_predictor);
    const Matrix gap = (y_dot - y_tilde).cwiseAbs().rowwise().mean();
    for (Eigen::Index i = 0; i < count; ++i) out.outcome_gap(start + i) = gap.middleRows(i * m, m).mean();
  }
  return out;
}

void write_ite_csv(std::ostream& out, const ItEstimate& e) {
  const Eigen::Index dy = e.y1_hat.cols();
  out << "subject-id";
  for (const char* stem : {"y1_hat", "y0_hat", "ite_hat"}) {
    for (Eigen::Index j = 0; j < dy; ++j) {
      out << ',' << stem;
      if (dy > 1) out << '_' << j;
    }
  }
  out << '\n';
  char buf[32];
  auto num = [&](double v) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out << ',';
    out.write(buf, res.ptr - buf);
  };
  for (Eigen::Index i = 0; i < e.y1_hat.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < dy; ++j) num(e.y1_hat(i, j));
    for (Eigen::Index j = 0; j < dy; ++j) num(e.y0_hat(i, j));
    for (Eigen::Index j = 0; j < dy; ++j) num(e.ite(i, j));
    out << '\n';
  }
}

}  // namespace cegan
