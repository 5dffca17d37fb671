#include "sifaudit/sentemb.hpp"

#include <cmath>
#include <limits>

#include "sifaudit/error.hpp"

namespace sifaudit {

SentenceMethod parse_sentence_method(const std::string& name) {
  if (name == "avg") return SentenceMethod::kAvg;
  if (name == "sif") return SentenceMethod::kSif;
  raise(ErrorKind::kConfig, "unknown sentence method '" + name + "' (avg|sif)");
}

OovPolicy parse_oov_policy(const std::string& name) {
  if (name == "skip") return OovPolicy::kSkip;
  if (name == "zero") return OovPolicy::kZero;
  raise(ErrorKind::kConfig, "unknown oov policy '" + name + "' (skip|zero)");
}

std::string to_string(SentenceMethod method) {
  return method == SentenceMethod::kAvg ? "avg" : "sif";
}

std::string to_string(OovPolicy policy) { return policy == OovPolicy::kSkip ? "skip" : "zero"; }

AlignedFrequencies align_frequencies(const EmbeddingMatrix& vectors, const Vocabulary& counts) {
  if (counts.total_tokens() == 0) raise(ErrorKind::kDataFormat, "frequency table is empty");
  AlignedFrequencies out;
  out.p.assign(vectors.size(), std::numeric_limits<double>::quiet_NaN());
  const auto total = static_cast<double>(counts.total_tokens());
  const auto& vocab = vectors.vocabulary();
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (auto id = counts.id_of(vocab.tokens()[i])) {
      out.p[i] = static_cast<double>(counts.count(*id)) / total;
    } else {
      ++out.missing;
    }
  }
  return out;
}

namespace {

template <typename Weight>
SentenceEmbedding weighted_mean(std::span<const std::string> sentence,
                                const EmbeddingMatrix& vectors, OovPolicy policy,
                                Weight&& weight) {
  SentenceEmbedding out;
  out.vector = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vectors.dim()));
  for (const auto& token : sentence) {
    auto id = vectors.find(token);
    if (!id) {
      ++out.out_of_vocabulary;
      continue;
    }
    ++out.in_vocabulary;
    out.vector += weight(*id, out) * vectors.row(*id).transpose();
  }
  if (out.in_vocabulary == 0) {
    if (policy == OovPolicy::kSkip) {
      raise(ErrorKind::kDegenerate, "sentence has no in-vocabulary token");
    }
    out.zero_fallback = true;
    return out;
  }
  out.vector /= static_cast<double>(out.in_vocabulary);
  return out;
}

}  // namespace

SentenceEmbedding embed_average(std::span<const std::string> sentence,
                                const EmbeddingMatrix& vectors, OovPolicy policy) {
  return weighted_mean(sentence, vectors, policy, [](TokenId, SentenceEmbedding&) { return 1.0; });
}

SentenceEmbedding embed_sif(std::span<const std::string> sentence, const EmbeddingMatrix& vectors,
                            std::span<const double> p, double a, OovPolicy policy) {
  if (!(a > 0.0)) raise(ErrorKind::kParameter, "SIF constant a must be > 0");
  if (p.size() != vectors.size()) {
    raise(ErrorKind::kParameter, "frequency vector does not match embedding vocabulary");
  }
  return weighted_mean(sentence, vectors, policy, [&](TokenId id, SentenceEmbedding& out) {
    double pw = p[id];
    if (std::isnan(pw)) {
      ++out.missing_frequency;
      pw = 0.0;
    }
    return a / (pw + a);
  });
}

SentenceEmbedding embed_sentence(std::span<const std::string> sentence,
                                 const EmbeddingMatrix& vectors, std::span<const double> p,
                                 const SentenceEmbeddingConfig& config) {
  if (config.method == SentenceMethod::kAvg) {
    return embed_average(sentence, vectors, config.oov_policy);
  }
  return embed_sif(sentence, vectors, p, config.a, config.oov_policy);
}

SentenceMatrix remove_principal_components(SentenceMatrix matrix, std::size_t r, bool centered) {
  const auto m = static_cast<std::size_t>(matrix.rows.rows());
  const auto d = static_cast<std::size_t>(matrix.rows.cols());
  if (m == 0) raise(ErrorKind::kParameter, "principal component removal needs at least one row");
  if (r == 0) return matrix;
  if (r >= std::min(m, d)) {
    raise(ErrorKind::kParameter, "cannot remove " + std::to_string(r) +
                                     " components from a " + std::to_string(m) + "x" +
                                     std::to_string(d) + " matrix");
  }
  const auto k = static_cast<Eigen::Index>(r);
  if (matrix.removed_components.size() >= r) {
    // Already fitted: re-apply the recorded projector.
    Eigen::MatrixXd components(static_cast<Eigen::Index>(d), k);
    for (Eigen::Index i = 0; i < k; ++i) components.col(i) = matrix.removed_components[i].direction;
    matrix.rows -= (matrix.rows * components) * components.transpose();
    return matrix;
  }
  Eigen::MatrixXd fit = matrix.rows;
  if (centered) fit.rowwise() -= fit.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(fit, Eigen::ComputeThinV);
  const Eigen::MatrixXd components = svd.matrixV().leftCols(k);
  matrix.rows -= (matrix.rows * components) * components.transpose();
  matrix.removed_components.clear();
  for (Eigen::Index i = 0; i < k; ++i) {
    matrix.removed_components.push_back({svd.singularValues()[i], components.col(i)});
  }
  return matrix;
}

}  // namespace sifaudit
