#pragma once

// Dense word vectors aligned to a vocabulary, with text-format loaders.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sifaudit/corpus.hpp"

namespace sifaudit {

class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::shared_ptr<const Vocabulary> vocab, Eigen::MatrixXd vectors);

  std::size_t size() const noexcept { return static_cast<std::size_t>(vectors_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(vectors_.cols()); }

  const Eigen::MatrixXd& vectors() const noexcept { return vectors_; }
  const Vocabulary& vocabulary() const noexcept { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocabulary_ptr() const noexcept { return vocab_; }

  auto row(TokenId id) const { return vectors_.row(id); }
  std::optional<TokenId> find(const std::string& token) const { return vocab_->id_of(token); }

  /// Per-row L2 norms, computed once.
  const Eigen::VectorXd& norms() const;

  /// Copy with unit-length rows. Zero rows stay zero and are counted in
  /// zero_rows().
  EmbeddingMatrix normalized() const;
  std::size_t zero_rows() const;

 private:
  std::shared_ptr<const Vocabulary> vocab_ = std::make_shared<Vocabulary>();
  Eigen::MatrixXd vectors_;
  mutable std::optional<Eigen::VectorXd> norm_cache_;
};

enum class VectorFormat { kAuto, kGlove, kWord2Vec };

VectorFormat parse_vector_format(const std::string& name);

/// GloVe text has no header; word2vec text starts with "n d". kAuto sniffs the
/// first line. Tokens are lowercased; later duplicates are dropped.
EmbeddingMatrix read_word_vectors(std::istream& in, VectorFormat format = VectorFormat::kAuto);
EmbeddingMatrix load_word_vectors(const std::string& path, VectorFormat format = VectorFormat::kAuto);

/// word2vec text format: "n d" header then "token v1 ... vd".
void write_word2vec_text(std::ostream& out, const EmbeddingMatrix& embeddings);

}  // namespace sifaudit
