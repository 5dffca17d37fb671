#include "sifaudit/sparse.hpp"

#include <algorithm>
#include <thread>

#include "sifaudit/error.hpp"

namespace sifaudit {

SparseMatrix::SparseMatrix(std::uint32_t rows, std::uint32_t cols) : rows_(rows), cols_(cols) {
  row_offsets_.reserve(static_cast<std::size_t>(rows) + 1);
}

void SparseMatrix::push_row(std::span<const std::uint32_t> cols, std::span<const double> values) {
  if (row_offsets_.size() > rows_) raise(ErrorKind::kIndex, "too many sparse rows");
  columns_.insert(columns_.end(), cols.begin(), cols.end());
  values_.insert(values_.end(), values.begin(), values.end());
  row_offsets_.push_back(columns_.size());
}

SparseMatrix SparseMatrix::from_sorted_triplets(std::uint32_t rows, std::uint32_t cols,
                                                std::span<const Triplet> triplets) {
  SparseMatrix m(rows, cols);
  m.row_offsets_.assign(static_cast<std::size_t>(rows) + 1, 0);
  m.columns_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (t.row >= rows || t.col >= cols) raise(ErrorKind::kIndex, "sparse triplet out of range");
    if (k > 0 && std::pair(triplets[k - 1].row, triplets[k - 1].col) >= std::pair(t.row, t.col)) {
      raise(ErrorKind::kDataFormat, "sparse triplets not strictly sorted");
    }
    m.columns_.push_back(t.col);
    m.values_.push_back(t.value);
    ++m.row_offsets_[t.row + 1];
  }
  for (std::uint32_t r = 0; r < rows; ++r) m.row_offsets_[r + 1] += m.row_offsets_[r];
  return m;
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& dense) {
  SparseMatrix m(static_cast<std::uint32_t>(dense.rows()), static_cast<std::uint32_t>(dense.cols()));
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  for (Eigen::Index r = 0; r < dense.rows(); ++r) {
    cols.clear();
    vals.clear();
    for (Eigen::Index c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) {
        cols.push_back(static_cast<std::uint32_t>(c));
        vals.push_back(dense(r, c));
      }
    }
    m.push_row(cols, vals);
  }
  return m;
}

double SparseMatrix::coeff(std::uint32_t row, std::uint32_t col) const {
  const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_.at(row));
  const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_.at(row + 1));
  auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - columns_.begin())];
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  t.row_offsets_.assign(static_cast<std::size_t>(cols_) + 1, 0);
  for (auto c : columns_) ++t.row_offsets_[c + 1];
  for (std::uint32_t c = 0; c < cols_; ++c) t.row_offsets_[c + 1] += t.row_offsets_[c];
  t.columns_.resize(columns_.size());
  t.values_.resize(values_.size());
  std::vector<std::uint64_t> cursor(t.row_offsets_.begin(), t.row_offsets_.end() - 1);
  for (std::uint32_t r = 0; r < rows_; ++r) {
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const auto dst = cursor[columns_[k]]++;
      t.columns_[dst] = r;
      t.values_[dst] = values_[k];
    }
  }
  return t;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (std::uint32_t r = 0; r < rows_; ++r) {
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) d(r, columns_[k]) = values_[k];
  }
  return d;
}

std::vector<SparseMatrix::Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (std::uint32_t r = 0; r < rows_; ++r) {
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      out.push_back({r, columns_[k], values_[k]});
    }
  }
  return out;
}

Eigen::MatrixXd SparseMatrix::multiply(const Eigen::MatrixXd& dense, unsigned threads) const {
  if (dense.rows() != cols_) raise(ErrorKind::kParameter, "sparse multiply: shape mismatch");
  // Row-major copy so each sparse entry touches one contiguous row.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rhs = dense;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out =
      Eigen::MatrixXd::Zero(rows_, dense.cols());
  auto work = [&](std::uint32_t begin, std::uint32_t end) {
    for (std::uint32_t r = begin; r < end; ++r) {
      for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
        out.row(r).noalias() += values_[k] * rhs.row(columns_[k]);
      }
    }
  };
  threads = std::max(1U, std::min<unsigned>(threads, std::max<std::uint32_t>(rows_, 1)));
  if (threads == 1) {
    work(0, rows_);
  } else {
    std::vector<std::thread> workers;
    const std::uint32_t step = (rows_ + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint32_t begin = std::min(rows_, t * step);
      const std::uint32_t end = std::min(rows_, begin + step);
      workers.emplace_back(work, begin, end);
    }
    for (auto& w : workers) w.join();
  }
  return out;
}

}  // namespace sifaudit
