#include "sifaudit/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "sifaudit/error.hpp"

namespace sifaudit::genmodel {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double hi = v.maxCoeff();
  return hi + std::log((v.array() - hi).exp().sum());
}

void require_sentence(std::span<const TokenId> sentence, std::size_t n) {
  if (sentence.empty()) raise(ErrorKind::kParameter, "sentence must be nonempty");
  for (auto w : sentence) {
    if (w >= n) raise(ErrorKind::kIndex, "sentence word id " + std::to_string(w) + " out of range");
  }
}

Eigen::VectorXd random_unit(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(dim);
  for (auto& x : v) x = normal(rng);
  return v / v.norm();
}

}  // namespace

GenModelParams::GenModelParams(Eigen::MatrixXd word_vectors, std::vector<double> p, double alpha,
                               double beta, Eigen::VectorXd c0)
    : word_vectors_(std::move(word_vectors)),
      p_(std::move(p)),
      alpha_(alpha),
      beta_(beta),
      c0_(std::move(c0)) {
  if (word_vectors_.rows() == 0) raise(ErrorKind::kParameter, "model needs at least one word");
  if (p_.size() != static_cast<std::size_t>(word_vectors_.rows())) {
    raise(ErrorKind::kParameter, "unigram size does not match word vectors");
  }
  if (!(alpha_ >= 0.0 && alpha_ <= 1.0)) raise(ErrorKind::kParameter, "alpha must lie in [0, 1]");
  if (!(beta_ >= 0.0 && beta_ <= 1.0)) raise(ErrorKind::kParameter, "beta must lie in [0, 1]");
  if (c0_.size() != word_vectors_.cols()) raise(ErrorKind::kParameter, "c0 dimension mismatch");
  if (std::abs(c0_.norm() - 1.0) > 1e-9) raise(ErrorKind::kParameter, "c0 must be a unit vector");
}

SmoothedContext SmoothedContext::make(const Eigen::VectorXd& raw_context,
                                      const Eigen::VectorXd& c0, double beta) {
  if (raw_context.size() != c0.size()) raise(ErrorKind::kParameter, "context dimension mismatch");
  SmoothedContext ctx;
  ctx.c = raw_context - c0.dot(raw_context) * c0;
  ctx.orthogonality_residual = std::abs(c0.dot(ctx.c));
  ctx.c_tilde = beta * c0 + (1.0 - beta) * ctx.c;
  return ctx;
}

double log_partition(const Eigen::MatrixXd& word_vectors, const Eigen::VectorXd& x) {
  return log_sum_exp(word_vectors * x);
}

double log_emission_prob(TokenId word, const Eigen::VectorXd& c_tilde,
                         const GenModelParams& params) {
  if (word >= params.n()) raise(ErrorKind::kIndex, "word id out of range");
  const double alpha = params.alpha();
  const double log_z = log_partition(params.word_vectors(), c_tilde);
  const double unigram = alpha * params.p()[word];
  const double t1 = unigram > 0.0 ? std::log(unigram) : kNegInf;
  const double t2 = alpha < 1.0
                        ? std::log1p(-alpha) + params.word_vectors().row(word).dot(c_tilde) - log_z
                        : kNegInf;
  return log_add_exp(t1, t2);
}

double emission_prob(TokenId word, const SmoothedContext& context, const GenModelParams& params) {
  return std::exp(log_emission_prob(word, context.c_tilde, params));
}

AlphaBoundReport alpha_lower_bound(std::uint64_t n, double weight_high) {
  if (n == 0) raise(ErrorKind::kParameter, "vocabulary size must be >= 1");
  if (!(weight_high > 0.0)) raise(ErrorKind::kParameter, "weight_high must be > 0");
  AlphaBoundReport report;
  report.n = n;
  report.weight_high = weight_high;
  report.z_lower_bound = static_cast<double>(n);
  const double ratio = static_cast<double>(n) / weight_high;
  report.alpha_min = std::isinf(ratio) ? 1.0 : ratio / (ratio + 1.0);
  report.unigram_residual = std::isinf(ratio) ? 0.0 : 1.0 / (ratio + 1.0);
  return report;
}

double sentence_loglik(std::span<const TokenId> sentence, const Eigen::VectorXd& c_tilde,
                       const GenModelParams& params) {
  require_sentence(sentence, params.n());
  const double alpha = params.alpha();
  const double log_z = log_partition(params.word_vectors(), c_tilde);
  const double log_mix = alpha < 1.0 ? std::log1p(-alpha) - log_z : kNegInf;
  double total = 0.0;
  for (auto w : sentence) {
    const double unigram = alpha * params.p()[w];
    const double t1 = unigram > 0.0 ? std::log(unigram) : kNegInf;
    const double t2 = log_mix == kNegInf ? kNegInf
                                         : log_mix + params.word_vectors().row(w).dot(c_tilde);
    total += log_add_exp(t1, t2);
  }
  return total;
}

Eigen::VectorXd gradient_at_zero(std::span<const TokenId> sentence, const GenModelParams& params) {
  require_sentence(sentence, params.n());
  const double alpha = params.alpha();
  const double n = static_cast<double>(params.n());
  const Eigen::RowVectorXd mean = params.word_vectors().colwise().mean();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.dim()));
  if (alpha == 1.0) return g;
  const double mix = (1.0 - alpha) / n;
  for (auto w : sentence) {
    const double coef = mix / (alpha * params.p()[w] + mix);
    g += coef * (params.word_vectors().row(w) - mean).transpose();
  }
  return g;
}

Eigen::VectorXd sphere_argmax(const Eigen::VectorXd& gradient) {
  const double norm = gradient.norm();
  if (!(norm > 0.0)) {
    raise(ErrorKind::kDegenerate, "zero gradient: every point on the sphere is a maximizer");
  }
  return gradient / norm;
}

LinearizationGap linearization_gap(std::span<const TokenId> sentence, const GenModelParams& params,
                                   double radius) {
  LinearizationGap report;
  report.radius = radius;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.dim()));
  report.ell_at_zero = sentence_loglik(sentence, zero, params);
  const Eigen::VectorXd g = gradient_at_zero(sentence, params);
  if (params.alpha() == 1.0) {
    report.c_star = zero;
    report.linear_value_at_cstar = report.ell_at_zero;
    report.true_value_at_cstar = report.ell_at_zero;
    return report;
  }
  report.c_star = radius * sphere_argmax(g);
  report.linear_value_at_cstar = report.ell_at_zero + g.dot(report.c_star);
  report.true_value_at_cstar = sentence_loglik(sentence, report.c_star, params);
  report.gap = std::abs(report.true_value_at_cstar - report.linear_value_at_cstar);
  return report;
}

void SifModelParams::validate() const {
  if (!(a > 0.0)) raise(ErrorKind::kParameter, "SIF constant a must be > 0");
  if (word_vectors.rows() == 0) raise(ErrorKind::kParameter, "model needs at least one word");
  if (p.size() != static_cast<std::size_t>(word_vectors.rows())) {
    raise(ErrorKind::kParameter, "unigram size does not match word vectors");
  }
}

Eigen::VectorXd SifModelParams::weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) w[static_cast<Eigen::Index>(i)] = a / (p[i] + a);
  return w;
}

double sif_objective(std::span<const TokenId> sentence, const Eigen::VectorXd& c,
                     const SifModelParams& params, bool freeze_normalizer) {
  params.validate();
  require_sentence(sentence, params.p.size());
  const Eigen::VectorXd omega = params.weights();
  double total = 0.0;
  for (auto w : sentence) total += omega[w] * params.word_vectors.row(w).dot(c);
  if (!freeze_normalizer) {
    const Eigen::VectorXd scores = omega.cwiseProduct(params.word_vectors * c);
    total -= static_cast<double>(sentence.size()) * log_sum_exp(scores);
  }
  return total;
}

Eigen::VectorXd sif_objective_gradient(std::span<const TokenId> sentence, const Eigen::VectorXd& c,
                                       const SifModelParams& params, bool freeze_normalizer) {
  params.validate();
  require_sentence(sentence, params.p.size());
  const Eigen::VectorXd omega = params.weights();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(params.word_vectors.cols());
  for (auto w : sentence) g += omega[w] * params.word_vectors.row(w).transpose();
  if (!freeze_normalizer) {
    Eigen::VectorXd scores = omega.cwiseProduct(params.word_vectors * c);
    scores = (scores.array() - scores.maxCoeff()).exp();
    const Eigen::VectorXd softmax = scores / scores.sum();
    g -= static_cast<double>(sentence.size()) *
         (params.word_vectors.transpose() * softmax.cwiseProduct(omega));
  }
  return g;
}

Eigen::VectorXd sif_closed_form(std::span<const TokenId> sentence, const SifModelParams& params) {
  params.validate();
  require_sentence(sentence, params.p.size());
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(params.word_vectors.cols());
  for (auto w : sentence) {
    sum += (params.a / (params.p[w] + params.a)) * params.word_vectors.row(w).transpose();
  }
  return sphere_argmax(sum);
}

MapOracleReport sif_map_oracle(std::span<const TokenId> sentence, const SifModelParams& params,
                               const MapOracleOptions& options) {
  MapOracleReport report;
  report.closed_form = sif_closed_form(sentence, params);
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(params.word_vectors.cols());
  report.linearized_argmax =
      sphere_argmax(sif_objective_gradient(sentence, origin, params, /*freeze_normalizer=*/true));
  report.linearized_deviation =
      (report.linearized_argmax - report.closed_form).cwiseAbs().maxCoeff();

  std::mt19937_64 rng(options.seed);
  Eigen::VectorXd c = random_unit(rng, params.word_vectors.cols());
  for (report.iterations = 0; report.iterations < options.steps;) {
    Eigen::VectorXd g = sif_objective_gradient(sentence, c, params);
    g -= g.dot(c) * c;  // tangent component
    Eigen::VectorXd next = c + options.step_size * g;
    next /= next.norm();
    ++report.iterations;
    const double moved = (next - c).norm();
    c = std::move(next);
    if (moved < options.tolerance) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged) {
    report.warning = "projected ascent did not converge within " + std::to_string(options.steps) +
                     " steps";
  }
  report.numeric_argmax = c;
  report.cosine = c.dot(report.closed_form);
  return report;
}

ToyModel make_toy_model(std::uint64_t seed, std::size_t dim, std::size_t n,
                        std::size_t sentence_length, double a) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (auto& x : vectors.reshaped()) x = normal(rng);
  vectors.rowwise() -= vectors.colwise().mean();

  std::vector<double> p(n);
  for (std::size_t r = 0; r < n; ++r) p[r] = 1.0 / static_cast<double>(r + 1);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= total;

  std::uniform_int_distribution<TokenId> pick(0, static_cast<TokenId>(n - 1));
  ToyModel model;
  model.sif = SifModelParams{std::move(vectors), std::move(p), a};
  for (std::size_t i = 0; i < sentence_length; ++i) model.sentence.push_back(pick(rng));
  return model;
}

GenModelParams make_toy_genmodel(std::uint64_t seed, std::size_t dim, std::size_t n,
                                 double max_alpha) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (auto& x : vectors.reshaped()) x = 0.5 * normal(rng);
  std::vector<double> p(n);
  for (auto& x : p) x = 0.05 + unit(rng);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= total;
  const double alpha = max_alpha * unit(rng);
  const double beta = unit(rng);
  Eigen::VectorXd c0(static_cast<Eigen::Index>(dim));
  for (auto& x : c0) x = normal(rng);
  c0 /= c0.norm();
  return GenModelParams(std::move(vectors), std::move(p), alpha, beta, std::move(c0));
}

}  // namespace sifaudit::genmodel
