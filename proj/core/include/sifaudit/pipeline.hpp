#pragma once

// End-to-end runs: word-embedding table, STS comparison, analytical audit.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sifaudit/config.hpp"
#include "sifaudit/cooccurrence.hpp"
#include "sifaudit/corpus.hpp"

namespace sifaudit {

struct RunReport {
  std::string kind;              // "table1", "sts", "audit", ...
  nlohmann::json config;         // resolved snapshot
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> timings_seconds;  // not part of to_json()
  std::map<std::string, std::string> attachments;               // file name -> contents

  void warn(std::string message) { warnings.push_back(std::move(message)); }

  /// Canonical form: identical configs give byte-identical dumps.
  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Writes <stem>.json, <stem>.txt, <stem>.timings.json and any attachments
/// into `dir`, creating it if needed.
void write_report(const RunReport& report, const std::string& dir, const std::string& stem);

struct CorpusStatistics {
  Vocabulary vocab;
  CoocCounts cooc;
  std::uint64_t corpus_tokens = 0;
};

/// Vocabulary and co-occurrence counts for the configured corpus. When the
/// SIFAUDIT_CACHE_DIR environment variable names a directory, results are
/// cached there keyed by corpus path, size, mtime, vocab size and window.
CorpusStatistics load_corpus_statistics(const PipelineConfig& config, RunReport* report = nullptr);

struct WordBenchmarks {
  std::vector<WordSimDataset> similarity;
  std::vector<AnalogyDataset> analogy;
};

WordBenchmarks load_word_benchmarks(const DatasetManifest& manifest);

/// Similarity (first wordsim dataset drives the headline score) and
/// micro-averaged analogy accuracy, with per-dataset coverage.
nlohmann::json evaluate_word_vectors(const EmbeddingMatrix& vectors, const WordBenchmarks& benchmarks,
                                     AnalogyRule rule, RunReport& report, const std::string& label);

RunReport run_table1(const PipelineConfig& config);
RunReport run_sts(const PipelineConfig& config);
RunReport run_audit(const PipelineConfig& config);

/// Scores a single sentence-embedding condition on every STS dataset.
RunReport run_eval_sts(const PipelineConfig& config, const SentenceEmbeddingConfig& condition);

/// Unigram counts backing SIF weights: the frequency table if configured,
/// else counts over the whole corpus. Throws kConfig when neither exists.
Vocabulary load_frequency_source(const PipelineConfig& config, RunReport& report);

/// Fixed-point rendering with `decimals` digits, rounded to nearest.
std::string format_fixed(double x, int decimals);

}  // namespace sifaudit
