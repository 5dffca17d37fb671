#include "sifaudit/embeddings.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>
#include <vector>

#include "sifaudit/error.hpp"

namespace sifaudit {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::shared_ptr<const Vocabulary> vocab, Eigen::MatrixXd vectors)
    : vocab_(std::move(vocab)), vectors_(std::move(vectors)) {
  if (!vocab_ || static_cast<std::size_t>(vectors_.rows()) != vocab_->size()) {
    raise(ErrorKind::kParameter, "embedding rows must match vocabulary size");
  }
}

const Eigen::VectorXd& EmbeddingMatrix::norms() const {
  if (!norm_cache_) norm_cache_ = vectors_.rowwise().norm();
  return *norm_cache_;
}

std::size_t EmbeddingMatrix::zero_rows() const {
  const auto& n = norms();
  return static_cast<std::size_t>((n.array() == 0.0).count());
}

EmbeddingMatrix EmbeddingMatrix::normalized() const {
  Eigen::MatrixXd unit = vectors_;
  const auto& n = norms();
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    if (n[i] > 0.0) unit.row(i) /= n[i];
  }
  return EmbeddingMatrix(vocab_, std::move(unit));
}

VectorFormat parse_vector_format(const std::string& name) {
  if (name == "auto" || name.empty()) return VectorFormat::kAuto;
  if (name == "glove") return VectorFormat::kGlove;
  if (name == "word2vec") return VectorFormat::kWord2Vec;
  raise(ErrorKind::kConfig, "unknown vector format '" + name + "' (auto|glove|word2vec)");
}

EmbeddingMatrix read_word_vectors(std::istream& in, VectorFormat format) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::vector<std::string> tokens;
  std::vector<double> values;
  std::unordered_set<std::string> seen;

  auto fail = [&](const std::string& why) {
    raise(ErrorKind::kDataFormat, "word vectors line " + std::to_string(line_no) + ": " + why);
  };

  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (first) {
      first = false;
      std::size_t n_hdr = 0, d_hdr = 0;
      const bool header_like =
          fields.size() == 2 && parse_size(fields[0], n_hdr) && parse_size(fields[1], d_hdr);
      if (format == VectorFormat::kWord2Vec && !header_like) fail("expected 'n d' header");
      if (header_like && format != VectorFormat::kGlove) {
        dim = d_hdr;
        tokens.reserve(n_hdr);
        values.reserve(n_hdr * d_hdr);
        continue;
      }
    }
    if (fields.size() < 2) fail("expected a token followed by values");
    if (dim == 0) dim = fields.size() - 1;
    if (fields.size() - 1 != dim) {
      fail("expected " + std::to_string(dim) + " values, found " + std::to_string(fields.size() - 1));
    }
    auto token = lower(fields[0]);
    if (!seen.insert(token).second) continue;
    tokens.push_back(std::move(token));
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double v = 0.0;
      if (!parse_double(fields[k], v)) fail("bad number '" + std::string(fields[k]) + "'");
      values.push_back(v);
    }
  }
  if (tokens.empty()) raise(ErrorKind::kDataFormat, "word vector file contains no vectors");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(tokens.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t k = 0; k < dim; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = values[i * dim + k];
  }
  auto vocab = std::make_shared<const Vocabulary>(Vocabulary::from_tokens(std::move(tokens)));
  return EmbeddingMatrix(std::move(vocab), std::move(m));
}

EmbeddingMatrix load_word_vectors(const std::string& path, VectorFormat format) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::kConfig, "cannot open word vector file '" + path + "'");
  return read_word_vectors(in, format);
}

void write_word2vec_text(std::ostream& out, const EmbeddingMatrix& embeddings) {
  out << embeddings.size() << ' ' << embeddings.dim() << '\n';
  out << std::setprecision(9);
  const auto& v = embeddings.vectors();
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    out << embeddings.vocabulary().token(static_cast<TokenId>(i));
    for (Eigen::Index k = 0; k < v.cols(); ++k) out << ' ' << v(static_cast<Eigen::Index>(i), k);
    out << '\n';
  }
}

}  // namespace sifaudit
