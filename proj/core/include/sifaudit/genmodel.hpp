#pragma once

// Executable forms of the word-production model behind SIF: the mixture
// emission probability, the lower bound it forces on the unigram weight, the
// first-order expansion of the sentence log-likelihood and how far it drifts
// from the true objective on the unit sphere, and a numeric check of the MAP
// estimate under the frequency-reweighted log-linear model.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sifaudit/corpus.hpp"

namespace sifaudit::genmodel {

/// Mixture model p(w | c~) = alpha p(w) + (1 - alpha) exp(<w, c~>) / Z(c~).
class GenModelParams {
 public:
  /// Validates alpha, beta in [0, 1], |c0| = 1 (within 1e-9), and shapes.
  GenModelParams(Eigen::MatrixXd word_vectors, std::vector<double> p, double alpha,
                 double beta, Eigen::VectorXd c0);

  const Eigen::MatrixXd& word_vectors() const noexcept { return word_vectors_; }
  const std::vector<double>& p() const noexcept { return p_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  const Eigen::VectorXd& c0() const noexcept { return c0_; }
  std::size_t n() const noexcept { return static_cast<std::size_t>(word_vectors_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(word_vectors_.cols()); }

 private:
  Eigen::MatrixXd word_vectors_;
  std::vector<double> p_;
  double alpha_;
  double beta_;
  Eigen::VectorXd c0_;
};

/// c~ = beta c0 + (1 - beta) c, with c projected off c0 at construction.
struct SmoothedContext {
  Eigen::VectorXd c;
  Eigen::VectorXd c_tilde;
  double orthogonality_residual = 0.0;  // |<c0, c>| after projection

  static SmoothedContext make(const Eigen::VectorXd& raw_context, const Eigen::VectorXd& c0,
                              double beta);
};

/// log sum_w exp(<w, x>), max-shifted.
double log_partition(const Eigen::MatrixXd& word_vectors, const Eigen::VectorXd& x);

double log_emission_prob(TokenId word, const Eigen::VectorXd& c_tilde,
                         const GenModelParams& params);
double emission_prob(TokenId word, const SmoothedContext& context, const GenModelParams& params);

struct AlphaBoundReport {
  std::uint64_t n = 0;
  double weight_low = 1e-4;
  double weight_high = 1e-3;
  double z_lower_bound = 0.0;  // Z >= n under isotropic word vectors
  double alpha_min = 0.0;
  double unigram_residual = 0.0;  // 1 - alpha_min
};

/// From (1 - alpha) / (alpha Z) <= weight_high and Z >= n:
/// alpha >= (n / weight_high) / (n / weight_high + 1).
AlphaBoundReport alpha_lower_bound(std::uint64_t n, double weight_high = 1e-3);

/// Sum over the sentence of log p(w | c~).
double sentence_loglik(std::span<const TokenId> sentence, const Eigen::VectorXd& c_tilde,
                       const GenModelParams& params);

/// Analytic gradient of sentence_loglik at c~ = 0:
/// sum_w [(1-alpha)/n / (alpha p(w) + (1-alpha)/n)] (w - mean word vector).
Eigen::VectorXd gradient_at_zero(std::span<const TokenId> sentence, const GenModelParams& params);

/// Maximizer of g^T x over the unit sphere. Throws kDegenerate for g = 0.
Eigen::VectorXd sphere_argmax(const Eigen::VectorXd& gradient);

struct LinearizationGap {
  double ell_at_zero = 0.0;
  double linear_value_at_cstar = 0.0;  // ell(0) + g^T c*
  double true_value_at_cstar = 0.0;    // ell(c*)
  double gap = 0.0;
  double radius = 1.0;
  Eigen::VectorXd c_star;
};

/// Evaluates both sides of the first-order expansion at c* = radius *
/// sphere_argmax(grad ell(0)). When alpha = 1 the objective is constant and
/// the gap is reported as 0 with c* = 0.
LinearizationGap linearization_gap(std::span<const TokenId> sentence, const GenModelParams& params,
                                   double radius = 1.0);

/// Log-linear model p(w | c~) proportional to exp(a / (p(w) + a) <w, c~>).
struct SifModelParams {
  Eigen::MatrixXd word_vectors;
  std::vector<double> p;
  double a = 1e-3;

  void validate() const;
  Eigen::VectorXd weights() const;  // a / (p(w) + a)
};

/// Sentence log-likelihood under the log-linear model; with freeze_normalizer
/// the partition term is dropped (treated as a constant).
double sif_objective(std::span<const TokenId> sentence, const Eigen::VectorXd& c,
                     const SifModelParams& params, bool freeze_normalizer = false);
Eigen::VectorXd sif_objective_gradient(std::span<const TokenId> sentence, const Eigen::VectorXd& c,
                                       const SifModelParams& params,
                                       bool freeze_normalizer = false);

/// normalize(sum_w a / (p(w) + a) w)
Eigen::VectorXd sif_closed_form(std::span<const TokenId> sentence, const SifModelParams& params);

struct MapOracleOptions {
  std::size_t steps = 2000;
  double step_size = 0.1;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;  // random unit starting point
};

struct MapOracleReport {
  Eigen::VectorXd numeric_argmax;
  Eigen::VectorXd closed_form;
  Eigen::VectorXd linearized_argmax;
  double cosine = 0.0;                   // <numeric_argmax, closed_form>
  double linearized_deviation = 0.0;     // max |linearized_argmax - closed_form|
  std::size_t iterations = 0;
  bool converged = false;
  std::string warning;
};

/// Projected gradient ascent of the full log-linear objective on the unit
/// sphere, compared with the closed-form SIF direction.
MapOracleReport sif_map_oracle(std::span<const TokenId> sentence, const SifModelParams& params,
                               const MapOracleOptions& options = {});

/// Random model for audits: isotropic (centered Gaussian) word vectors,
/// Zipfian unigram probabilities, a uniformly drawn sentence.
struct ToyModel {
  SifModelParams sif;
  std::vector<TokenId> sentence;
};

ToyModel make_toy_model(std::uint64_t seed, std::size_t dim = 10, std::size_t n = 50,
                        std::size_t sentence_length = 5, double a = 1e-3);

/// Random mixture model with alpha drawn from [0, max_alpha].
GenModelParams make_toy_genmodel(std::uint64_t seed, std::size_t dim, std::size_t n,
                                 double max_alpha = 0.9);

}  // namespace sifaudit::genmodel
