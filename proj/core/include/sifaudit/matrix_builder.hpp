#pragma once

// Factorization targets built from co-occurrence counts: shifted PMI and the
// frequency-reweighted log-conditional matrix M.

#include <iosfwd>
#include <string>
#include <variant>

#include "sifaudit/cooccurrence.hpp"
#include "sifaudit/corpus.hpp"
#include "sifaudit/sparse.hpp"

namespace sifaudit {

struct ShiftedPmi {
  double k = 1.0;
  friend bool operator==(const ShiftedPmi&, const ShiftedPmi&) = default;
};

struct MMatrix {
  double a = 1e-3;
  double log_z = 13.0;
  friend bool operator==(const MMatrix&, const MMatrix&) = default;
};

using TargetKind = std::variant<ShiftedPmi, MMatrix>;

std::string describe(const TargetKind& kind);

/// Zero-count cells are absent from `matrix` and read as 0 by the factorizer.
struct FactorizationTarget {
  TargetKind kind;
  bool clamp_negative = true;  // when set, only values > 0 are stored
  SparseMatrix matrix;

  std::uint32_t n() const noexcept { return matrix.rows(); }

  friend bool operator==(const FactorizationTarget&, const FactorizationTarget&) = default;
};

/// value(w, c) = log(#(w,c) * total / (#w * #c)) - log k for every observed pair.
FactorizationTarget build_shifted_pmi(const CoocCounts& cooc, double k, bool clamp);

/// value(w, c) = ((p[w] + a) / a) * (log(#(w,c) / #c) + log_z) for every observed pair.
FactorizationTarget build_m_matrix(const CoocCounts& cooc, const UnigramDistribution& p,
                                   double a, double log_z, bool clamp);

// Binary layout, little-endian: "SIFMATX1", u32 n, u64 nnz, u8 kind (0 PMI,
// 1 M), u8 clamp, f64 param0 (k or a), f64 param1 (0 or log_z), then nnz
// triples (u32 row, u32 col, f64 value) in row-major order.
void write_target_binary(std::ostream& out, const FactorizationTarget& target);
FactorizationTarget read_target_binary(std::istream& in);

}  // namespace sifaudit
