#include "sifaudit/matrix_builder.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "sifaudit/binary_io.hpp"
#include "sifaudit/error.hpp"

namespace sifaudit {
namespace {

template <typename CellValue>
SparseMatrix build_rows(const CoocCounts& cooc, bool clamp, CellValue&& value) {
  SparseMatrix m(cooc.n(), cooc.n());
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  const auto offsets = cooc.row_offsets();
  for (TokenId w = 0; w < cooc.n(); ++w) {
    cols.clear();
    vals.clear();
    for (auto k = offsets[w]; k < offsets[w + 1]; ++k) {
      const TokenId c = cooc.columns()[k];
      const double v = value(w, c, cooc.counts()[k]);
      if (clamp && !(v > 0.0)) continue;
      cols.push_back(c);
      vals.push_back(v);
    }
    m.push_row(cols, vals);
  }
  return m;
}

}  // namespace

std::string describe(const TargetKind& kind) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* pmi = std::get_if<ShiftedPmi>(&kind)) {
    os << "shifted-pmi(k=" << pmi->k << ")";
  } else {
    const auto& m = std::get<MMatrix>(kind);
    os << "m-matrix(a=" << m.a << ", log_z=" << m.log_z << ")";
  }
  return os.str();
}

FactorizationTarget build_shifted_pmi(const CoocCounts& cooc, double k, bool clamp) {
  if (!(k > 0.0) || !std::isfinite(k)) raise(ErrorKind::kParameter, "PMI shift k must be > 0");
  if (cooc.total_pairs() == 0) raise(ErrorKind::kDegenerate, "co-occurrence matrix is empty");
  const double log_total = std::log(static_cast<double>(cooc.total_pairs()));
  const double log_k = std::log(k);
  std::vector<double> log_row(cooc.n());
  for (TokenId w = 0; w < cooc.n(); ++w) {
    const auto s = cooc.row_sum(w);
    log_row[w] = s > 0 ? std::log(static_cast<double>(s)) : 0.0;
  }
  auto matrix = build_rows(cooc, clamp, [&](TokenId w, TokenId c, std::uint32_t count) {
    return std::log(static_cast<double>(count)) + log_total - log_row[w] - log_row[c] - log_k;
  });
  return {ShiftedPmi{k}, clamp, std::move(matrix)};
}

FactorizationTarget build_m_matrix(const CoocCounts& cooc, const UnigramDistribution& p,
                                   double a, double log_z, bool clamp) {
  if (!(a > 0.0) || !std::isfinite(a)) raise(ErrorKind::kParameter, "M-matrix a must be > 0");
  if (!std::isfinite(log_z)) raise(ErrorKind::kParameter, "log_z must be finite");
  if (cooc.total_pairs() == 0) raise(ErrorKind::kDegenerate, "co-occurrence matrix is empty");
  if (p.size() != cooc.n()) {
    raise(ErrorKind::kParameter, "unigram distribution size does not match co-occurrence size");
  }
  std::vector<double> log_col(cooc.n());
  for (TokenId c = 0; c < cooc.n(); ++c) {
    const auto s = cooc.row_sum(c);
    log_col[c] = s > 0 ? std::log(static_cast<double>(s)) : 0.0;
  }
  auto matrix = build_rows(cooc, clamp, [&](TokenId w, TokenId c, std::uint32_t count) {
    const double log_cond = std::log(static_cast<double>(count)) - log_col[c];
    return ((p[w] + a) / a) * (log_cond + log_z);
  });
  return {MMatrix{a, log_z}, clamp, std::move(matrix)};
}

void write_target_binary(std::ostream& out, const FactorizationTarget& target) {
  binary::write_magic(out, "SIFMATX1");
  binary::write<std::uint32_t>(out, target.n());
  binary::write<std::uint64_t>(out, target.matrix.nnz());
  if (const auto* pmi = std::get_if<ShiftedPmi>(&target.kind)) {
    binary::write<std::uint8_t>(out, 0);
    binary::write<std::uint8_t>(out, target.clamp_negative ? 1 : 0);
    binary::write<double>(out, pmi->k);
    binary::write<double>(out, 0.0);
  } else {
    const auto& m = std::get<MMatrix>(target.kind);
    binary::write<std::uint8_t>(out, 1);
    binary::write<std::uint8_t>(out, target.clamp_negative ? 1 : 0);
    binary::write<double>(out, m.a);
    binary::write<double>(out, m.log_z);
  }
  for (const auto& t : target.matrix.triplets()) {
    binary::write<std::uint32_t>(out, t.row);
    binary::write<std::uint32_t>(out, t.col);
    binary::write<double>(out, t.value);
  }
  if (!out) raise(ErrorKind::kConfig, "failed writing matrix file");
}

FactorizationTarget read_target_binary(std::istream& in) {
  binary::expect_magic(in, "SIFMATX1");
  const auto n = binary::read<std::uint32_t>(in);
  const auto nnz = binary::read<std::uint64_t>(in);
  const auto kind = binary::read<std::uint8_t>(in);
  const auto clamp = binary::read<std::uint8_t>(in);
  const auto param0 = binary::read<double>(in);
  const auto param1 = binary::read<double>(in);
  FactorizationTarget target;
  if (kind == 0) {
    target.kind = ShiftedPmi{param0};
  } else if (kind == 1) {
    target.kind = MMatrix{param0, param1};
  } else {
    raise(ErrorKind::kDataFormat, "unknown matrix kind tag " + std::to_string(kind));
  }
  target.clamp_negative = clamp != 0;
  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(nnz);
  for (std::uint64_t k = 0; k < nnz; ++k) {
    SparseMatrix::Triplet t{};
    t.row = binary::read<std::uint32_t>(in);
    t.col = binary::read<std::uint32_t>(in);
    t.value = binary::read<double>(in);
    triplets.push_back(t);
  }
  target.matrix = SparseMatrix::from_sorted_triplets(n, n, triplets);
  return target;
}

}  // namespace sifaudit
