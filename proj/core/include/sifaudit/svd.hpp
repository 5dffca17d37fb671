#pragma once

// Randomized truncated SVD of sparse matrices and embedding extraction.

#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "sifaudit/embeddings.hpp"
#include "sifaudit/matrix_builder.hpp"
#include "sifaudit/sparse.hpp"

namespace sifaudit {

struct SvdOptions {
  std::size_t rank = 200;
  std::uint64_t seed = 0;
  std::size_t oversample = 10;
  std::size_t power_iters = 4;
  unsigned threads = 1;
};

/// A ~= U * diag(S) * V^T with r = rank columns in U and V.
struct SvdResult {
  Eigen::MatrixXd U;  // rows x r, orthonormal columns
  Eigen::VectorXd S;  // r values, non-increasing, >= 0
  Eigen::MatrixXd V;  // cols x r, orthonormal columns
  std::size_t rank = 0;
  std::uint64_t seed = 0;

  Eigen::MatrixXd reconstruct() const { return U * S.asDiagonal() * V.transpose(); }
};

/// Gaussian range finder with `oversample` extra columns and `power_iters`
/// re-orthonormalized subspace iterations, then an exact SVD of the projected
/// matrix. Each U column is signed so its largest-magnitude entry is positive
/// (V follows). Output is bit-identical for identical inputs, including across
/// thread counts.
SvdResult truncated_svd(const SparseMatrix& matrix, const SvdOptions& options);
SvdResult truncated_svd(const FactorizationTarget& target, const SvdOptions& options);

enum class SigmaWeighting { kHalf, kFull, kNone };

SigmaWeighting parse_sigma_weighting(const std::string& name);
std::string to_string(SigmaWeighting weighting);

/// Rows of U * diag(S^e) with e = 1/2, 1 or 0.
Eigen::MatrixXd extract_embeddings(const SvdResult& svd, SigmaWeighting weighting);
EmbeddingMatrix extract_embeddings(const SvdResult& svd, SigmaWeighting weighting,
                                   std::shared_ptr<const Vocabulary> vocab);

}  // namespace sifaudit
