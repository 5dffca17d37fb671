#pragma once

// Corpus ingestion: tokenization, frequency-ranked vocabulary, unigram
// probabilities.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sifaudit {

using TokenId = std::uint32_t;

/// Marks a corpus position holding an out-of-vocabulary token.
inline constexpr TokenId kOutOfVocabulary = std::numeric_limits<TokenId>::max();

using TokenCounts = std::unordered_map<std::string, std::uint64_t>;

/// Streams whitespace-delimited, ASCII-lowercased tokens from `in` to `sink`.
/// Input must be valid UTF-8; a DecodeError carries the offending byte offset.
void for_each_token(std::istream& in,
                    const std::function<void(std::string_view)>& sink);

std::vector<std::string> tokenize(std::string_view text);

/// Splits a sentence for lookup against pretrained vectors: lowercases and
/// separates ASCII punctuation into single-character tokens.
std::vector<std::string> tokenize_sentence(std::string_view sentence);

TokenCounts count_tokens(std::istream& in);

/// Counts in `threads` contiguous shards merged by addition; the result is
/// identical to sequential counting.
TokenCounts count_tokens(std::span<const std::string> tokens, unsigned threads = 1);

class Vocabulary {
 public:
  Vocabulary() = default;

  /// Keeps the `max_size` most frequent tokens; ties go to the
  /// lexicographically smaller token.
  static Vocabulary from_counts(const TokenCounts& counts, std::size_t max_size);

  /// Takes entries in the given id order. Counts must be non-increasing.
  static Vocabulary from_entries(
      std::vector<std::pair<std::string, std::uint64_t>> entries);

  /// Token list with no counts (pretrained vector files).
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::uint64_t count(TokenId id) const { return counts_.at(id); }
  std::optional<TokenId> id_of(const std::string& token) const;
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }

  std::span<const std::string> tokens() const noexcept { return tokens_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.counts_ == b.counts_;
  }

 private:
  void index();

  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, TokenId> id_of_;
  std::uint64_t total_tokens_ = 0;
};

/// Throws kEmptyCorpus when `tokens` is empty and kParameter when max_size is 0.
Vocabulary build_vocabulary(std::span<const std::string> tokens, std::size_t max_size,
                            unsigned threads = 1);
Vocabulary build_vocabulary(std::istream& corpus, std::size_t max_size);

struct UnigramDistribution {
  std::vector<double> p;

  std::size_t size() const noexcept { return p.size(); }
  double operator[](TokenId id) const { return p[id]; }
};

UnigramDistribution unigram_probabilities(const Vocabulary& vocab);

/// Maps every corpus token to its id, or kOutOfVocabulary.
std::vector<TokenId> encode(std::istream& corpus, const Vocabulary& vocab);
std::vector<TokenId> encode(std::span<const std::string> tokens, const Vocabulary& vocab);

/// token<TAB>count, one line per entry in id order.
void write_vocabulary_tsv(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocabulary_tsv(std::istream& in);

}  // namespace sifaudit
