#pragma once

// Symmetric sliding-window co-occurrence counting.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sifaudit/corpus.hpp"

namespace sifaudit {

struct WindowConfig {
  std::uint32_t window = 5;  // context radius on each side; every pair weighs 1
};

/// Sparse symmetric word-context count matrix in CSR layout.
class CoocCounts {
 public:
  struct Entry {
    TokenId word;
    TokenId context;
    std::uint32_t count;
  };

  CoocCounts() = default;

  /// Builds from entries sorted by (word, context) with positive counts.
  /// Validates symmetry and recomputes marginals.
  static CoocCounts from_sorted_entries(std::uint32_t n, std::span<const Entry> entries);

  std::uint32_t n() const noexcept { return n_; }
  std::uint64_t nnz() const noexcept { return columns_.size(); }
  std::uint64_t total_pairs() const noexcept { return total_pairs_; }

  std::uint32_t count(TokenId word, TokenId context) const;
  std::uint64_t row_sum(TokenId word) const { return row_sums_.at(word); }
  std::span<const std::uint64_t> row_sums() const noexcept { return row_sums_; }

  std::span<const std::uint64_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const TokenId> columns() const noexcept { return columns_; }
  std::span<const std::uint32_t> counts() const noexcept { return counts_; }

  std::vector<Entry> entries() const;

  friend bool operator==(const CoocCounts&, const CoocCounts&) = default;
  friend CoocCounts count_cooccurrences(std::span<const TokenId>, std::uint32_t,
                                        const WindowConfig&, unsigned);

 private:
  std::uint32_t n_ = 0;
  std::vector<std::uint64_t> row_offsets_{0};
  std::vector<TokenId> columns_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint64_t> row_sums_;
  std::uint64_t total_pairs_ = 0;
};

/// Every ordered position pair (i, j) with 0 < |i - j| <= window and both ids in
/// vocabulary adds one to entry(id_i, id_j). kOutOfVocabulary positions keep
/// their slot in the window but contribute nothing. Counting is split into
/// `threads` shards whose results are merged exactly.
CoocCounts count_cooccurrences(std::span<const TokenId> ids, std::uint32_t n,
                               const WindowConfig& config, unsigned threads = 1);

// Binary layout, little-endian: "SIFCOOC1", u32 n, u64 nnz, then nnz triples
// (u32 row, u32 col, u32 count) in row-major order.
void write_cooc_binary(std::ostream& out, const CoocCounts& cooc);
CoocCounts read_cooc_binary(std::istream& in);
void write_cooc_tsv(std::ostream& out, const CoocCounts& cooc, const Vocabulary* vocab = nullptr);

}  // namespace sifaudit
