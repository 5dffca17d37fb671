#include "sifaudit/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "sifaudit/error.hpp"

namespace sifaudit {
namespace {

bool is_space(unsigned char ch) {
  return ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r' || ch == '\f' ||
         ch == '\v';
}

char ascii_lower(char ch) {
  return (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch;
}

// Incremental UTF-8 validator; state survives chunk boundaries.
class Utf8Validator {
 public:
  void feed(unsigned char byte, std::size_t offset) {
    if (pending_ == 0) {
      if (byte < 0x80) return;
      if (byte >= 0xC2 && byte <= 0xDF) {
        start(1, offset, 0x80, 0xBF);
      } else if (byte == 0xE0) {
        start(2, offset, 0xA0, 0xBF);
      } else if ((byte >= 0xE1 && byte <= 0xEC) || byte == 0xEE || byte == 0xEF) {
        start(2, offset, 0x80, 0xBF);
      } else if (byte == 0xED) {
        start(2, offset, 0x80, 0x9F);
      } else if (byte == 0xF0) {
        start(3, offset, 0x90, 0xBF);
      } else if (byte >= 0xF1 && byte <= 0xF3) {
        start(3, offset, 0x80, 0xBF);
      } else if (byte == 0xF4) {
        start(3, offset, 0x80, 0x8F);
      } else {
        fail(offset);
      }
      return;
    }
    if (byte < lo_ || byte > hi_) fail(sequence_start_);
    lo_ = 0x80;
    hi_ = 0xBF;
    --pending_;
  }

  void finish(std::size_t offset) const {
    if (pending_ != 0) fail(sequence_start_ < offset ? sequence_start_ : offset);
  }

 private:
  void start(int pending, std::size_t offset, unsigned char lo, unsigned char hi) {
    pending_ = pending;
    sequence_start_ = offset;
    lo_ = lo;
    hi_ = hi;
  }

  [[noreturn]] static void fail(std::size_t offset) {
    throw DecodeError(offset, "invalid UTF-8 at byte offset " + std::to_string(offset));
  }

  int pending_ = 0;
  std::size_t sequence_start_ = 0;
  unsigned char lo_ = 0x80;
  unsigned char hi_ = 0xBF;
};

void add_counts(TokenCounts& into, const TokenCounts& from) {
  for (const auto& [token, count] : from) into[token] += count;
}

}  // namespace

void for_each_token(std::istream& in,
                    const std::function<void(std::string_view)>& sink) {
  constexpr std::size_t kChunk = 1 << 20;
  std::vector<char> buffer(kChunk);
  std::string current;
  Utf8Validator validator;
  std::size_t offset = 0;
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      const auto byte = static_cast<unsigned char>(buffer[i]);
      validator.feed(byte, offset + i);
      if (is_space(byte)) {
        if (!current.empty()) {
          sink(current);
          current.clear();
        }
      } else {
        current.push_back(ascii_lower(buffer[i]));
      }
    }
    offset += got;
  }
  validator.finish(offset);
  if (!current.empty()) sink(current);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> out;
  for_each_token(in, [&](std::string_view tok) { out.emplace_back(tok); });
  return out;
}

std::vector<std::string> tokenize_sentence(std::string_view sentence) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (char ch : sentence) {
    const auto byte = static_cast<unsigned char>(ch);
    if (is_space(byte)) {
      flush();
    } else if (byte < 0x80 && std::ispunct(byte) && ch != '\'' && ch != '-') {
      flush();
      out.emplace_back(1, ch);
    } else {
      current.push_back(ascii_lower(ch));
    }
  }
  flush();
  return out;
}

TokenCounts count_tokens(std::istream& in) {
  TokenCounts counts;
  for_each_token(in, [&](std::string_view tok) { ++counts[std::string(tok)]; });
  return counts;
}

TokenCounts count_tokens(std::span<const std::string> tokens, unsigned threads) {
  threads = std::max(1U, threads);
  if (threads == 1 || tokens.size() < 2 * threads) {
    TokenCounts counts;
    for (const auto& tok : tokens) ++counts[tok];
    return counts;
  }
  std::vector<TokenCounts> shards(threads);
  std::vector<std::thread> workers;
  const std::size_t step = (tokens.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(tokens.size(), t * step);
    const std::size_t end = std::min(tokens.size(), begin + step);
    workers.emplace_back([&, t, begin, end] {
      for (std::size_t i = begin; i < end; ++i) ++shards[t][tokens[i]];
    });
  }
  for (auto& w : workers) w.join();
  TokenCounts merged = std::move(shards[0]);
  for (unsigned t = 1; t < threads; ++t) add_counts(merged, shards[t]);
  return merged;
}

Vocabulary Vocabulary::from_counts(const TokenCounts& counts, std::size_t max_size) {
  if (max_size == 0) raise(ErrorKind::kParameter, "vocabulary max_size must be >= 1");
  std::vector<std::pair<std::string, std::uint64_t>> entries(counts.begin(), counts.end());
  auto by_rank = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  if (entries.size() > max_size) {
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(max_size),
                      entries.end(), by_rank);
    entries.resize(max_size);
  } else {
    std::sort(entries.begin(), entries.end(), by_rank);
  }
  return from_entries(std::move(entries));
}

Vocabulary Vocabulary::from_entries(
    std::vector<std::pair<std::string, std::uint64_t>> entries) {
  Vocabulary vocab;
  vocab.tokens_.reserve(entries.size());
  vocab.counts_.reserve(entries.size());
  for (auto& [token, count] : entries) {
    if (!vocab.counts_.empty() && count > vocab.counts_.back()) {
      raise(ErrorKind::kDataFormat,
            "vocabulary counts must be non-increasing (at token '" + token + "')");
    }
    vocab.tokens_.push_back(std::move(token));
    vocab.counts_.push_back(count);
    vocab.total_tokens_ += count;
  }
  vocab.index();
  return vocab;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary vocab;
  vocab.counts_.assign(tokens.size(), 0);
  vocab.tokens_ = std::move(tokens);
  vocab.index();
  return vocab;
}

void Vocabulary::index() {
  id_of_.clear();
  id_of_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!id_of_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      raise(ErrorKind::kDataFormat, "duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

std::optional<TokenId> Vocabulary::id_of(const std::string& token) const {
  auto it = id_of_.find(token);
  if (it == id_of_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(std::span<const std::string> tokens, std::size_t max_size,
                            unsigned threads) {
  if (max_size == 0) raise(ErrorKind::kParameter, "vocabulary max_size must be >= 1");
  if (tokens.empty()) raise(ErrorKind::kEmptyCorpus, "corpus contains no tokens");
  return Vocabulary::from_counts(count_tokens(tokens, threads), max_size);
}

Vocabulary build_vocabulary(std::istream& corpus, std::size_t max_size) {
  if (max_size == 0) raise(ErrorKind::kParameter, "vocabulary max_size must be >= 1");
  auto counts = count_tokens(corpus);
  if (counts.empty()) raise(ErrorKind::kEmptyCorpus, "corpus contains no tokens");
  return Vocabulary::from_counts(counts, max_size);
}

UnigramDistribution unigram_probabilities(const Vocabulary& vocab) {
  if (vocab.empty() || vocab.total_tokens() == 0) {
    raise(ErrorKind::kParameter, "unigram probabilities need a nonempty counted vocabulary");
  }
  UnigramDistribution dist;
  dist.p.reserve(vocab.size());
  const auto total = static_cast<double>(vocab.total_tokens());
  for (auto count : vocab.counts()) dist.p.push_back(static_cast<double>(count) / total);
  return dist;
}

std::vector<TokenId> encode(std::istream& corpus, const Vocabulary& vocab) {
  std::vector<TokenId> ids;
  std::string key;
  for_each_token(corpus, [&](std::string_view tok) {
    key.assign(tok);
    ids.push_back(vocab.id_of(key).value_or(kOutOfVocabulary));
  });
  return ids;
}

std::vector<TokenId> encode(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& tok : tokens) ids.push_back(vocab.id_of(tok).value_or(kOutOfVocabulary));
  return ids;
}

void write_vocabulary_tsv(std::ostream& out, const Vocabulary& vocab) {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.tokens()[i] << '\t' << vocab.counts()[i] << '\n';
  }
}

Vocabulary read_vocabulary_tsv(std::istream& in) {
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) tab = line.rfind(' ');
    if (tab == std::string::npos || tab == 0) {
      raise(ErrorKind::kDataFormat,
            "frequency table line " + std::to_string(line_no) + ": expected token<TAB>count");
    }
    std::uint64_t count = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc() || ptr != last) {
      raise(ErrorKind::kDataFormat,
            "frequency table line " + std::to_string(line_no) + ": bad count");
    }
    entries.emplace_back(line.substr(0, tab), count);
  }
  // Frequency tables from other tools are not always sorted.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return Vocabulary::from_entries(std::move(entries));
}

}  // namespace sifaudit
