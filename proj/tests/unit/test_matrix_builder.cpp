#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "expect.hpp"
#include "oracles.hpp"
#include "sifaudit/cooccurrence.hpp"
#include "sifaudit/matrix_builder.hpp"

using namespace sifaudit;

namespace {

CoocCounts small_cooc() {
  const std::vector<CoocCounts::Entry> e{{0, 1, 2}, {1, 0, 2}};
  return CoocCounts::from_sorted_entries(2, e);
}

void check_matches_dense(const SparseMatrix& sparse, const Eigen::MatrixXd& dense) {
  std::size_t expected_nnz = 0;
  for (int i = 0; i < dense.rows(); ++i) {
    for (int j = 0; j < dense.cols(); ++j) {
      if (std::isnan(dense(i, j))) {
        CHECK(sparse.coeff(i, j) == 0.0);
      } else {
        ++expected_nnz;
        CHECK(sparse.coeff(i, j) == doctest::Approx(dense(i, j)).epsilon(1e-12));
      }
    }
  }
  CHECK(sparse.nnz() == expected_nnz);
}

}  // namespace

TEST_CASE("shifted PMI hand example") {
  const auto t = build_shifted_pmi(small_cooc(), 1.0, false);
  CHECK(t.matrix.coeff(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(t.matrix.coeff(1, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(t.matrix.nnz() == 2);
  const auto shifted = build_shifted_pmi(small_cooc(), 2.0, true);
  CHECK(shifted.matrix.nnz() == 0);
}

TEST_CASE("shifted PMI parameter errors") {
  CHECK(oracle::error_kind([] { build_shifted_pmi(small_cooc(), 0.0, true); }) ==
        ErrorKind::kParameter);
  CHECK(oracle::error_kind([] { build_shifted_pmi(small_cooc(), -1.0, true); }) ==
        ErrorKind::kParameter);
}

TEST_CASE("M matrix hand example") {
  UnigramDistribution p{{0.5, 0.5}};
  const auto t = build_m_matrix(small_cooc(), p, 0.5, 13.0, true);
  CHECK(t.matrix.coeff(0, 1) == doctest::Approx(26.0).epsilon(1e-15));
  CHECK(t.matrix.coeff(1, 0) == doctest::Approx(26.0).epsilon(1e-15));
  // p(w|c) = 1 everywhere and log_z = 0 gives zeros, all dropped.
  CHECK(build_m_matrix(small_cooc(), p, 0.5, 0.0, true).matrix.nnz() == 0);
  CHECK(oracle::error_kind([&] { build_m_matrix(small_cooc(), p, 0.0, 13.0, true); }) ==
        ErrorKind::kParameter);
}

TEST_CASE("PMI and M agree with dense oracles on random counts") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::uint32_t n = 3 + rng() % 15;
    std::vector<TokenId> ids(400);
    for (auto& id : ids) id = static_cast<TokenId>(rng() % n);
    const auto cooc = count_cooccurrences(ids, n, WindowConfig{3});
    const auto dense = oracle::dense_counts(oracle::brute_force_cooc(ids, 3, kOutOfVocabulary), n);

    std::vector<double> p(n);
    double total = 0;
    for (auto& x : p) total += (x = 1.0 + static_cast<double>(rng() % 50));
    for (auto& x : p) x /= total;
    const UnigramDistribution up{p};

    for (bool clamp : {true, false}) {
      for (double k : {1.0, 5.0}) {
        check_matches_dense(build_shifted_pmi(cooc, k, clamp).matrix, oracle::dense_pmi(dense, k, clamp));
      }
      check_matches_dense(build_m_matrix(cooc, up, 1e-3, 13.0, clamp).matrix,
                          oracle::dense_m(dense, p, 1e-3, 13.0, clamp));
      check_matches_dense(build_m_matrix(cooc, up, 0.2, 0.5, clamp).matrix,
                          oracle::dense_m(dense, p, 0.2, 0.5, clamp));
    }
  }
}

TEST_CASE("clamped PMI keeps only positive values") {
  std::mt19937_64 rng(2);
  std::vector<TokenId> ids(2000);
  for (auto& id : ids) id = static_cast<TokenId>(rng() % 30);
  const auto t = build_shifted_pmi(count_cooccurrences(ids, 30, WindowConfig{5}), 1.0, true);
  for (double v : t.matrix.values()) CHECK(v > 0.0);
}

TEST_CASE("target binary round trip") {
  UnigramDistribution p{{0.5, 0.5}};
  const auto t = build_m_matrix(small_cooc(), p, 0.5, 13.0, true);
  std::stringstream buf;
  write_target_binary(buf, t);
  const auto back = read_target_binary(buf);
  CHECK(back.matrix == t.matrix);
  CHECK(back.clamp_negative == t.clamp_negative);
  CHECK(describe(back.kind) == describe(t.kind));
}
