#pragma once

// Sentence embeddings: plain averaging, SIF weighting, principal component
// removal.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sifaudit/corpus.hpp"
#include "sifaudit/embeddings.hpp"

namespace sifaudit {

enum class SentenceMethod { kAvg, kSif };
enum class OovPolicy { kSkip, kZero };

SentenceMethod parse_sentence_method(const std::string& name);
OovPolicy parse_oov_policy(const std::string& name);
std::string to_string(SentenceMethod method);
std::string to_string(OovPolicy policy);

struct SentenceEmbeddingConfig {
  SentenceMethod method = SentenceMethod::kSif;
  double a = 1e-3;
  std::size_t pcr_components = 1;
  OovPolicy oov_policy = OovPolicy::kSkip;
  bool centered_pcr = false;
};

/// Unigram probabilities aligned to an embedding vocabulary; NaN marks a word
/// with no frequency entry.
struct AlignedFrequencies {
  std::vector<double> p;
  std::size_t missing = 0;
};

AlignedFrequencies align_frequencies(const EmbeddingMatrix& vectors, const Vocabulary& counts);

struct SentenceEmbedding {
  Eigen::VectorXd vector;
  std::size_t in_vocabulary = 0;
  std::size_t out_of_vocabulary = 0;
  std::size_t missing_frequency = 0;  // SIF only: tokens weighted with p = 0
  bool zero_fallback = false;         // no in-vocabulary token, zero vector returned
};

/// Mean of the in-vocabulary token vectors. With no in-vocabulary token,
/// kSkip throws kDegenerate and kZero returns a flagged zero vector.
SentenceEmbedding embed_average(std::span<const std::string> sentence,
                                const EmbeddingMatrix& vectors, OovPolicy policy);

/// (1/|s|) sum_w a / (p(w) + a) v_w over in-vocabulary tokens.
SentenceEmbedding embed_sif(std::span<const std::string> sentence, const EmbeddingMatrix& vectors,
                            std::span<const double> p, double a, OovPolicy policy);

SentenceEmbedding embed_sentence(std::span<const std::string> sentence,
                                 const EmbeddingMatrix& vectors, std::span<const double> p,
                                 const SentenceEmbeddingConfig& config);

struct RemovedComponent {
  double singular_value = 0.0;
  Eigen::VectorXd direction;
};

struct SentenceMatrix {
  Eigen::MatrixXd rows;
  std::vector<std::size_t> sentence_ids;
  std::vector<RemovedComponent> removed_components;
};

/// Replaces every row x with x - sum_i (u_i^T x) u_i where u_1..u_r are the
/// top right singular vectors of the row matrix (mean-subtracted first when
/// `centered`). A matrix that already records at least r removed components
/// has that fitted projection re-applied instead of being refit, so the
/// operation is idempotent. r = 0 is a no-op; r >= min(m, d) is a parameter
/// error.
SentenceMatrix remove_principal_components(SentenceMatrix matrix, std::size_t r,
                                           bool centered = false);

}  // namespace sifaudit
