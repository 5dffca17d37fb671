#include "sifaudit/evaluation.hpp"

#include <algorithm>
#include <limits>

#include "sifaudit/corpus.hpp"
#include "sifaudit/error.hpp"

namespace sifaudit {
namespace {

constexpr Eigen::Index kAnalogyBatch = 256;

struct ResolvedQuestion {
  TokenId a, b, c, expected;
  std::size_t dataset;
};

}  // namespace

SimilarityScore eval_similarity(const EmbeddingMatrix& vectors, const WordSimDataset& dataset) {
  if (dataset.pairs.empty()) raise(ErrorKind::kParameter, dataset.name + ": empty dataset");
  SimilarityScore score;
  std::vector<double> cosines;
  std::vector<double> human;
  const auto& norms = vectors.norms();
  for (const auto& pair : dataset.pairs) {
    auto w1 = vectors.find(pair.word1);
    auto w2 = vectors.find(pair.word2);
    if (!w1 || !w2) {
      ++score.dropped;
      continue;
    }
    const double denom = norms[*w1] * norms[*w2];
    cosines.push_back(denom > 0.0 ? vectors.row(*w1).dot(vectors.row(*w2)) / denom : 0.0);
    human.push_back(pair.human_score);
  }
  score.used = cosines.size();
  if (score.used == 0) {
    raise(ErrorKind::kCoverage, dataset.name + ": every word pair is out of vocabulary");
  }
  score.spearman100 = 100.0 * spearman(cosines, human);
  return score;
}

AnalogyRule parse_analogy_rule(const std::string& name) {
  if (name == "3cosadd") return AnalogyRule::k3CosAdd;
  if (name == "3cosmul") return AnalogyRule::k3CosMul;
  raise(ErrorKind::kConfig, "unknown analogy rule '" + name + "' (3cosadd|3cosmul)");
}

std::string to_string(AnalogyRule rule) {
  return rule == AnalogyRule::k3CosAdd ? "3cosadd" : "3cosmul";
}

AnalogyScore eval_analogy(const EmbeddingMatrix& vectors, std::span<const AnalogyDataset> datasets,
                          AnalogyRule rule) {
  AnalogyScore score;
  std::vector<ResolvedQuestion> questions;
  std::size_t total_questions = 0;
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    auto& tally = score.per_dataset[datasets[k].name];
    for (const auto& q : datasets[k].questions) {
      ++total_questions;
      auto a = vectors.find(q.a), b = vectors.find(q.b), c = vectors.find(q.c),
           d = vectors.find(q.expected);
      if (!a || !b || !c || !d) {
        ++tally.dropped;
        ++score.total.dropped;
        continue;
      }
      questions.push_back({*a, *b, *c, *d, k});
    }
  }
  if (total_questions == 0) raise(ErrorKind::kParameter, "analogy datasets are empty");
  if (questions.empty()) {
    raise(ErrorKind::kCoverage, "every analogy question is out of vocabulary");
  }

  const Eigen::MatrixXd unit = vectors.normalized().vectors();
  const auto dim = unit.cols();
  for (std::size_t start = 0; start < questions.size(); start += kAnalogyBatch) {
    const auto count = static_cast<Eigen::Index>(
        std::min<std::size_t>(kAnalogyBatch, questions.size() - start));
    Eigen::MatrixXd scores;
    if (rule == AnalogyRule::k3CosAdd) {
      Eigen::MatrixXd targets(dim, count);
      for (Eigen::Index j = 0; j < count; ++j) {
        const auto& q = questions[start + static_cast<std::size_t>(j)];
        targets.col(j) = (unit.row(q.b) - unit.row(q.a) + unit.row(q.c)).transpose();
      }
      scores.noalias() = unit * targets;
    } else {
      Eigen::MatrixXd qa(dim, count), qb(dim, count), qc(dim, count);
      for (Eigen::Index j = 0; j < count; ++j) {
        const auto& q = questions[start + static_cast<std::size_t>(j)];
        qa.col(j) = unit.row(q.a).transpose();
        qb.col(j) = unit.row(q.b).transpose();
        qc.col(j) = unit.row(q.c).transpose();
      }
      const Eigen::ArrayXXd ca = ((unit * qa).array() + 1.0) / 2.0;
      const Eigen::ArrayXXd cb = ((unit * qb).array() + 1.0) / 2.0;
      const Eigen::ArrayXXd cc = ((unit * qc).array() + 1.0) / 2.0;
      scores = (cb * cc / (ca + 1e-3)).matrix();
    }
    for (Eigen::Index j = 0; j < count; ++j) {
      const auto& q = questions[start + static_cast<std::size_t>(j)];
      double best = -std::numeric_limits<double>::infinity();
      Eigen::Index best_id = -1;
      for (Eigen::Index w = 0; w < scores.rows(); ++w) {
        if (w == q.a || w == q.b || w == q.c) continue;
        if (scores(w, j) > best) {
          best = scores(w, j);
          best_id = w;
        }
      }
      auto& tally = score.per_dataset[datasets[q.dataset].name];
      ++tally.attempted;
      ++score.total.attempted;
      if (best_id == static_cast<Eigen::Index>(q.expected)) {
        ++tally.correct;
        ++score.total.correct;
      }
    }
  }
  return score;
}

AnalogyScore eval_analogy(const EmbeddingMatrix& vectors, const AnalogyDataset& dataset,
                          AnalogyRule rule) {
  return eval_analogy(vectors, std::span<const AnalogyDataset>(&dataset, 1), rule);
}

StsScore eval_sts(const StsDataset& dataset, const EmbeddingMatrix& vectors,
                  std::span<const double> p, const SentenceEmbeddingConfig& config) {
  if (dataset.pairs.empty()) raise(ErrorKind::kParameter, dataset.name + ": empty dataset");
  if (config.method == SentenceMethod::kSif && p.size() != vectors.size()) {
    raise(ErrorKind::kConfig, "SIF needs frequencies aligned to the word vectors");
  }
  StsScore score;
  std::vector<Eigen::VectorXd> embedded;
  std::vector<bool> zero_vector;
  auto embed = [&](const std::string& sentence, SentenceEmbedding& out) {
    const auto tokens = tokenize_sentence(sentence);
    SentenceEmbeddingConfig lenient = config;
    lenient.oov_policy = OovPolicy::kZero;
    out = embed_sentence(tokens, vectors, p, lenient);
    score.oov_tokens += out.out_of_vocabulary;
    score.missing_frequency += out.missing_frequency;
  };
  for (const auto& pair : dataset.pairs) {
    SentenceEmbedding e1, e2;
    embed(pair.sentence1, e1);
    embed(pair.sentence2, e2);
    if (config.oov_policy == OovPolicy::kSkip && (e1.zero_fallback || e2.zero_fallback)) {
      ++score.dropped_pairs;
      continue;
    }
    score.zero_sentences += static_cast<std::size_t>(e1.zero_fallback) +
                            static_cast<std::size_t>(e2.zero_fallback);
    embedded.push_back(std::move(e1.vector));
    embedded.push_back(std::move(e2.vector));
    score.gold.push_back(pair.gold);
  }
  if (score.gold.empty()) {
    raise(ErrorKind::kCoverage, dataset.name + ": no sentence pair has in-vocabulary tokens");
  }

  SentenceMatrix matrix;
  matrix.rows.resize(static_cast<Eigen::Index>(embedded.size()),
                     static_cast<Eigen::Index>(vectors.dim()));
  for (std::size_t i = 0; i < embedded.size(); ++i) {
    matrix.rows.row(static_cast<Eigen::Index>(i)) = embedded[i].transpose();
    matrix.sentence_ids.push_back(i);
  }
  if (config.pcr_components > 0) {
    matrix = remove_principal_components(std::move(matrix), config.pcr_components,
                                         config.centered_pcr);
  }

  score.scored_pairs = score.gold.size();
  score.predictions.reserve(score.gold.size());
  for (std::size_t k = 0; k < score.gold.size(); ++k) {
    const auto u = matrix.rows.row(static_cast<Eigen::Index>(2 * k));
    const auto v = matrix.rows.row(static_cast<Eigen::Index>(2 * k + 1));
    const double denom = u.norm() * v.norm();
    score.predictions.push_back(denom > 0.0 ? u.dot(v) / denom : 0.0);
  }
  score.pearson100 = 100.0 * pearson(score.predictions, score.gold);
  return score;
}

}  // namespace sifaudit
