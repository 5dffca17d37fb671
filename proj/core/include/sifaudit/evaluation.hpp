#pragma once

// Benchmark scoring for word and sentence embeddings.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sifaudit/datasets.hpp"
#include "sifaudit/embeddings.hpp"
#include "sifaudit/sentemb.hpp"
#include "sifaudit/statistics.hpp"

namespace sifaudit {

struct SimilarityScore {
  double spearman100 = 0.0;
  std::size_t used = 0;
  std::size_t dropped = 0;  // pairs with an out-of-vocabulary word
};

/// 100 * Spearman(cosine, human score) over pairs with both words known.
/// Throws kCoverage when every pair is out of vocabulary.
SimilarityScore eval_similarity(const EmbeddingMatrix& vectors, const WordSimDataset& dataset);

enum class AnalogyRule { k3CosAdd, k3CosMul };

AnalogyRule parse_analogy_rule(const std::string& name);
std::string to_string(AnalogyRule rule);

struct AnalogyTally {
  std::size_t correct = 0;
  std::size_t attempted = 0;
  std::size_t dropped = 0;  // questions with an out-of-vocabulary word

  double accuracy() const {
    return attempted == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(attempted);
  }
};

struct AnalogyScore {
  AnalogyTally total;                            // micro-averaged over all datasets
  std::map<std::string, AnalogyTally> per_dataset;

  double accuracy() const { return total.accuracy(); }
};

/// Answers each question with argmax over unit-normalized vectors, excluding
/// the three query words. k3CosAdd scores cos(w, b - a + c); k3CosMul scores
/// cos'(w,b) cos'(w,c) / (cos'(w,a) + 1e-3) with cos' = (cos + 1) / 2.
/// Throws kCoverage when every question is out of vocabulary.
AnalogyScore eval_analogy(const EmbeddingMatrix& vectors, std::span<const AnalogyDataset> datasets,
                          AnalogyRule rule = AnalogyRule::k3CosAdd);
AnalogyScore eval_analogy(const EmbeddingMatrix& vectors, const AnalogyDataset& dataset,
                          AnalogyRule rule = AnalogyRule::k3CosAdd);

struct StsScore {
  double pearson100 = 0.0;
  std::size_t scored_pairs = 0;
  std::size_t dropped_pairs = 0;      // skip policy: a sentence had no known token
  std::size_t zero_sentences = 0;     // zero policy: zero-vector sentences
  std::size_t oov_tokens = 0;
  std::size_t missing_frequency = 0;  // SIF tokens weighted with p = 0
  std::vector<double> predictions;
  std::vector<double> gold;
};

/// Embeds both sentences of each pair, removes principal components fitted
/// on all of this dataset's sentence embeddings, and returns
/// 100 * Pearson(cosine, gold). A zero sentence vector predicts 0.
StsScore eval_sts(const StsDataset& dataset, const EmbeddingMatrix& vectors,
                  std::span<const double> p, const SentenceEmbeddingConfig& config);

}  // namespace sifaudit
