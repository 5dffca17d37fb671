#pragma once

#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace sifaudit {

/// Compressed sparse row matrix of doubles.
class SparseMatrix {
 public:
  struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double value;
  };

  SparseMatrix() = default;
  SparseMatrix(std::uint32_t rows, std::uint32_t cols);

  /// Triplets must be sorted by (row, col) without duplicates.
  static SparseMatrix from_sorted_triplets(std::uint32_t rows, std::uint32_t cols,
                                           std::span<const Triplet> triplets);
  static SparseMatrix from_dense(const Eigen::MatrixXd& dense);

  std::uint32_t rows() const noexcept { return rows_; }
  std::uint32_t cols() const noexcept { return cols_; }
  std::uint64_t nnz() const noexcept { return values_.size(); }

  std::span<const std::uint64_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::uint32_t> columns() const noexcept { return columns_; }
  std::span<const double> values() const noexcept { return values_; }

  double coeff(std::uint32_t row, std::uint32_t col) const;
  SparseMatrix transpose() const;
  Eigen::MatrixXd to_dense() const;
  std::vector<Triplet> triplets() const;

  /// this * dense. Rows are split into contiguous blocks across `threads`;
  /// every output element is accumulated by one thread in column order, so
  /// the result does not depend on the thread count.
  Eigen::MatrixXd multiply(const Eigen::MatrixXd& dense, unsigned threads = 1) const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

  // Appending builder used by the matrix constructors.
  void push_row(std::span<const std::uint32_t> cols, std::span<const double> values);

 private:
  std::uint32_t rows_ = 0;
  std::uint32_t cols_ = 0;
  std::vector<std::uint64_t> row_offsets_{0};
  std::vector<std::uint32_t> columns_;
  std::vector<double> values_;
};

}  // namespace sifaudit
