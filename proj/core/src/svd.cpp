#include "sifaudit/svd.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sifaudit/error.hpp"

namespace sifaudit {
namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  // Fill column by column so the draw order is fixed by the layout.
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = normal(rng);
  }
  return m;
}

}  // namespace

SvdResult truncated_svd(const SparseMatrix& matrix, const SvdOptions& options) {
  const auto rows = static_cast<Eigen::Index>(matrix.rows());
  const auto cols = static_cast<Eigen::Index>(matrix.cols());
  const auto rank = static_cast<Eigen::Index>(options.rank);
  if (rank == 0) raise(ErrorKind::kParameter, "SVD rank must be >= 1");
  if (rank > std::min(rows, cols)) {
    raise(ErrorKind::kParameter, "SVD rank " + std::to_string(rank) +
                                     " exceeds matrix dimension " +
                                     std::to_string(std::min(rows, cols)));
  }
  const auto values = matrix.values();
  if (std::none_of(values.begin(), values.end(), [](double v) { return v != 0.0; })) {
    raise(ErrorKind::kDegenerate, "cannot factorize an all-zero matrix");
  }

  const SparseMatrix transposed = matrix.transpose();
  const Eigen::Index sketch =
      std::min<Eigen::Index>(rank + static_cast<Eigen::Index>(options.oversample), std::min(rows, cols));

  Eigen::MatrixXd q = orthonormal_basis(matrix.multiply(gaussian(cols, sketch, options.seed), options.threads));
  for (std::size_t it = 0; it < options.power_iters; ++it) {
    const Eigen::MatrixXd z = orthonormal_basis(transposed.multiply(q, options.threads));
    q = orthonormal_basis(matrix.multiply(z, options.threads));
  }

  // B = Q^T A, formed as (A^T Q)^T.
  const Eigen::MatrixXd bt = transposed.multiply(q, options.threads);
  Eigen::BDCSVD<Eigen::MatrixXd> small(bt.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);

  SvdResult result;
  result.rank = options.rank;
  result.seed = options.seed;
  result.U = q * small.matrixU().leftCols(rank);
  result.S = small.singularValues().head(rank);
  result.V = small.matrixV().leftCols(rank);
  for (Eigen::Index j = 0; j < rank; ++j) {
    Eigen::Index arg = 0;
    result.U.col(j).cwiseAbs().maxCoeff(&arg);
    if (result.U(arg, j) < 0.0) {
      result.U.col(j) *= -1.0;
      result.V.col(j) *= -1.0;
    }
  }
  return result;
}

SvdResult truncated_svd(const FactorizationTarget& target, const SvdOptions& options) {
  return truncated_svd(target.matrix, options);
}

SigmaWeighting parse_sigma_weighting(const std::string& name) {
  if (name == "half") return SigmaWeighting::kHalf;
  if (name == "full") return SigmaWeighting::kFull;
  if (name == "none") return SigmaWeighting::kNone;
  raise(ErrorKind::kConfig, "unknown sigma weighting '" + name + "' (half|full|none)");
}

std::string to_string(SigmaWeighting weighting) {
  switch (weighting) {
    case SigmaWeighting::kHalf: return "half";
    case SigmaWeighting::kFull: return "full";
    case SigmaWeighting::kNone: return "none";
  }
  return "half";
}

Eigen::MatrixXd extract_embeddings(const SvdResult& svd, SigmaWeighting weighting) {
  switch (weighting) {
    case SigmaWeighting::kHalf: return svd.U * svd.S.cwiseSqrt().asDiagonal();
    case SigmaWeighting::kFull: return svd.U * svd.S.asDiagonal();
    case SigmaWeighting::kNone: return svd.U;
  }
  return svd.U;
}

EmbeddingMatrix extract_embeddings(const SvdResult& svd, SigmaWeighting weighting,
                                   std::shared_ptr<const Vocabulary> vocab) {
  return EmbeddingMatrix(std::move(vocab), extract_embeddings(svd, weighting));
}

}  // namespace sifaudit
