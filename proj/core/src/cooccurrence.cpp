#include "sifaudit/cooccurrence.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>
#include <utility>

#include "sifaudit/binary_io.hpp"
#include "sifaudit/error.hpp"

namespace sifaudit {
namespace {

// Unordered pair {lo, hi} with lo <= hi packed as lo << 32 | hi.
using PairKey = std::uint64_t;
using KeyCounts = std::vector<std::pair<PairKey, std::uint64_t>>;

constexpr std::size_t kBlockPositions = 1 << 20;

KeyCounts compress(std::vector<PairKey>& keys) {
  std::sort(keys.begin(), keys.end());
  KeyCounts out;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    out.emplace_back(keys[i], j - i);
    i = j;
  }
  return out;
}

KeyCounts merge(const KeyCounts& a, const KeyCounts& b) {
  KeyCounts out;
  out.reserve(std::max(a.size(), b.size()));
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

KeyCounts count_range(std::span<const TokenId> ids, std::size_t begin, std::size_t end,
                      std::uint32_t window) {
  KeyCounts acc;
  std::vector<PairKey> keys;
  for (std::size_t block = begin; block < end; block += kBlockPositions) {
    const std::size_t block_end = std::min(end, block + kBlockPositions);
    keys.clear();
    for (std::size_t i = block; i < block_end; ++i) {
      const TokenId a = ids[i];
      if (a == kOutOfVocabulary) continue;
      const std::size_t last = std::min(ids.size() - 1, i + window);
      for (std::size_t j = i + 1; j <= last; ++j) {
        const TokenId b = ids[j];
        if (b == kOutOfVocabulary) continue;
        const auto lo = std::min(a, b);
        const auto hi = std::max(a, b);
        keys.push_back((static_cast<PairKey>(lo) << 32) | hi);
      }
    }
    auto counted = compress(keys);
    acc = acc.empty() ? std::move(counted) : merge(acc, counted);
  }
  return acc;
}

std::uint32_t checked_count(std::uint64_t value) {
  if (value > std::numeric_limits<std::uint32_t>::max()) {
    raise(ErrorKind::kDataFormat, "co-occurrence count overflows 32 bits");
  }
  return static_cast<std::uint32_t>(value);
}

}  // namespace

CoocCounts CoocCounts::from_sorted_entries(std::uint32_t n, std::span<const Entry> entries) {
  CoocCounts cooc;
  cooc.n_ = n;
  cooc.row_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  cooc.row_sums_.assign(n, 0);
  cooc.columns_.reserve(entries.size());
  cooc.counts_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (e.word >= n || e.context >= n) {
      raise(ErrorKind::kIndex, "co-occurrence entry index out of range");
    }
    if (e.count == 0) raise(ErrorKind::kDataFormat, "co-occurrence entry with zero count");
    if (k > 0) {
      const auto& prev = entries[k - 1];
      if (std::pair(prev.word, prev.context) >= std::pair(e.word, e.context)) {
        raise(ErrorKind::kDataFormat, "co-occurrence entries not strictly sorted");
      }
    }
    cooc.columns_.push_back(e.context);
    cooc.counts_.push_back(e.count);
    ++cooc.row_offsets_[e.word + 1];
    cooc.row_sums_[e.word] += e.count;
  }
  for (std::uint32_t w = 0; w < n; ++w) cooc.row_offsets_[w + 1] += cooc.row_offsets_[w];
  for (auto s : cooc.row_sums_) cooc.total_pairs_ += s;
  for (const auto& e : entries) {
    if (cooc.count(e.context, e.word) != e.count) {
      raise(ErrorKind::kDataFormat, "co-occurrence matrix is not symmetric");
    }
  }
  return cooc;
}

std::uint32_t CoocCounts::count(TokenId word, TokenId context) const {
  if (word >= n_ || context >= n_) raise(ErrorKind::kIndex, "co-occurrence lookup out of range");
  const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[word]);
  const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[word + 1]);
  auto it = std::lower_bound(first, last, context);
  if (it == last || *it != context) return 0;
  return counts_[static_cast<std::size_t>(it - columns_.begin())];
}

std::vector<CoocCounts::Entry> CoocCounts::entries() const {
  std::vector<Entry> out;
  out.reserve(columns_.size());
  for (std::uint32_t w = 0; w < n_; ++w) {
    for (auto k = row_offsets_[w]; k < row_offsets_[w + 1]; ++k) {
      out.push_back({w, columns_[k], counts_[k]});
    }
  }
  return out;
}

CoocCounts count_cooccurrences(std::span<const TokenId> ids, std::uint32_t n,
                               const WindowConfig& config, unsigned threads) {
  if (config.window == 0) raise(ErrorKind::kParameter, "window must be >= 1");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] != kOutOfVocabulary && ids[i] >= n) {
      raise(ErrorKind::kIndex, "token id " + std::to_string(ids[i]) + " at position " +
                                   std::to_string(i) + " is >= vocabulary size " +
                                   std::to_string(n));
    }
  }

  threads = std::max(1U, threads);
  std::vector<KeyCounts> shards(threads);
  const std::size_t step = (ids.size() + threads - 1) / threads;
  if (threads == 1) {
    shards[0] = count_range(ids, 0, ids.size(), config.window);
  } else {
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(ids.size(), t * step);
      const std::size_t end = std::min(ids.size(), begin + step);
      // A shard owns the left position of each pair; its windows read past
      // `end` into the neighbouring shard, so no pair is lost or doubled.
      workers.emplace_back([&, t, begin, end] {
        shards[t] = count_range(ids, begin, end, config.window);
      });
    }
    for (auto& w : workers) w.join();
  }
  KeyCounts merged = std::move(shards[0]);
  for (unsigned t = 1; t < threads; ++t) merged = merge(merged, shards[t]);

  // Expand unordered pairs into both orientations. Iterating keys in (lo, hi)
  // order leaves each row's columns sorted.
  CoocCounts cooc;
  cooc.n_ = n;
  cooc.row_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  cooc.row_sums_.assign(n, 0);
  for (const auto& [key, c] : merged) {
    const auto lo = static_cast<TokenId>(key >> 32);
    const auto hi = static_cast<TokenId>(key & 0xffffffffU);
    ++cooc.row_offsets_[lo + 1];
    if (lo != hi) ++cooc.row_offsets_[hi + 1];
  }
  for (std::uint32_t w = 0; w < n; ++w) cooc.row_offsets_[w + 1] += cooc.row_offsets_[w];
  const auto nnz = cooc.row_offsets_[n];
  cooc.columns_.resize(nnz);
  cooc.counts_.resize(nnz);
  std::vector<std::uint64_t> cursor(cooc.row_offsets_.begin(), cooc.row_offsets_.end() - 1);
  for (const auto& [key, c] : merged) {
    const auto lo = static_cast<TokenId>(key >> 32);
    const auto hi = static_cast<TokenId>(key & 0xffffffffU);
    if (lo == hi) {
      const auto value = checked_count(2 * c);
      cooc.columns_[cursor[lo]] = lo;
      cooc.counts_[cursor[lo]++] = value;
      cooc.row_sums_[lo] += value;
    } else {
      const auto value = checked_count(c);
      cooc.columns_[cursor[lo]] = hi;
      cooc.counts_[cursor[lo]++] = value;
      cooc.columns_[cursor[hi]] = lo;
      cooc.counts_[cursor[hi]++] = value;
      cooc.row_sums_[lo] += value;
      cooc.row_sums_[hi] += value;
    }
  }
  for (auto s : cooc.row_sums_) cooc.total_pairs_ += s;
  return cooc;
}

void write_cooc_binary(std::ostream& out, const CoocCounts& cooc) {
  binary::write_magic(out, "SIFCOOC1");
  binary::write<std::uint32_t>(out, cooc.n());
  binary::write<std::uint64_t>(out, cooc.nnz());
  for (std::uint32_t w = 0; w < cooc.n(); ++w) {
    for (auto k = cooc.row_offsets()[w]; k < cooc.row_offsets()[w + 1]; ++k) {
      binary::write<std::uint32_t>(out, w);
      binary::write<std::uint32_t>(out, cooc.columns()[k]);
      binary::write<std::uint32_t>(out, cooc.counts()[k]);
    }
  }
  if (!out) raise(ErrorKind::kConfig, "failed writing co-occurrence file");
}

CoocCounts read_cooc_binary(std::istream& in) {
  binary::expect_magic(in, "SIFCOOC1");
  const auto n = binary::read<std::uint32_t>(in);
  const auto nnz = binary::read<std::uint64_t>(in);
  std::vector<CoocCounts::Entry> entries;
  entries.reserve(nnz);
  for (std::uint64_t k = 0; k < nnz; ++k) {
    CoocCounts::Entry e{};
    e.word = binary::read<std::uint32_t>(in);
    e.context = binary::read<std::uint32_t>(in);
    e.count = binary::read<std::uint32_t>(in);
    entries.push_back(e);
  }
  return CoocCounts::from_sorted_entries(n, entries);
}

void write_cooc_tsv(std::ostream& out, const CoocCounts& cooc, const Vocabulary* vocab) {
  for (const auto& e : cooc.entries()) {
    if (vocab != nullptr) {
      out << vocab->token(e.word) << '\t' << vocab->token(e.context) << '\t' << e.count << '\n';
    } else {
      out << e.word << '\t' << e.context << '\t' << e.count << '\n';
    }
  }
}

}  // namespace sifaudit
