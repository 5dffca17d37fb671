#include <doctest.h>

#include <cmath>
#include <random>

#include "expect.hpp"
#include "oracles.hpp"
#include "sifaudit/sparse.hpp"
#include "sifaudit/svd.hpp"

using namespace sifaudit;

namespace {

SvdOptions opts(std::size_t rank, std::size_t power_iters = 4, std::uint64_t seed = 0) {
  SvdOptions o;
  o.rank = rank;
  o.power_iters = power_iters;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("Jacobi oracle agrees with a hand case") {
  Eigen::MatrixXd m(2, 2);
  m << 3, 0, 4, 5;
  const auto s = oracle::jacobi_singular_values(m);
  CHECK(s(0) == doctest::Approx(std::sqrt(45.0)).epsilon(1e-13));
  CHECK(s(1) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-13));
}

TEST_CASE("diagonal matrix at rank 2") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d.diagonal() << 3, 2, 1;
  const auto r = truncated_svd(SparseMatrix::from_dense(d), opts(2));
  CHECK(r.S(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.S(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK((d - r.reconstruct()).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("full rank reconstruction is exact") {
  std::mt19937_64 rng(1);
  const auto a = oracle::gaussian_matrix(rng, 30, 30);
  const auto r = truncated_svd(SparseMatrix::from_dense(a), opts(30, 2));
  CHECK((a - r.reconstruct()).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((r.U.transpose() * r.U - Eigen::MatrixXd::Identity(30, 30)).norm() < 1e-10);
  CHECK((r.V.transpose() * r.V - Eigen::MatrixXd::Identity(30, 30)).norm() < 1e-10);
}

TEST_CASE("random sparse 50x50 at rank 10 matches the dense oracle") {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution keep(0.2);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(50, 50);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      if (keep(rng)) a(i, j) = g(rng);
    }
  }
  const auto expected = oracle::jacobi_singular_values(a);
  const auto r = truncated_svd(SparseMatrix::from_dense(a), opts(10, 25));
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(r.S(i) - expected(i)) <= 1e-6 * expected(i));
  }
}

TEST_CASE("rectangular inputs") {
  std::mt19937_64 rng(8);
  for (auto [m, n] : {std::pair{40, 12}, std::pair{12, 40}}) {
    const auto a = oracle::gaussian_matrix(rng, m, n);
    const auto r = truncated_svd(SparseMatrix::from_dense(a), opts(12, 2));
    const auto expected = oracle::jacobi_singular_values(a);
    for (int i = 0; i < 12; ++i) CHECK(r.S(i) == doctest::Approx(expected(i)).epsilon(1e-9));
    CHECK(r.U.rows() == m);
    CHECK(r.V.rows() == n);
  }
}

TEST_CASE("errors") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
  const auto s = SparseMatrix::from_dense(a);
  CHECK(oracle::error_kind([&] { truncated_svd(s, opts(5)); }) == ErrorKind::kParameter);
  CHECK(oracle::error_kind([&] { truncated_svd(s, opts(0)); }) == ErrorKind::kParameter);
  const SparseMatrix zero(4, 4);
  CHECK(oracle::error_kind([&] { truncated_svd(zero, opts(2)); }) == ErrorKind::kDegenerate);
}

TEST_CASE("identical inputs give bit-identical output") {
  std::mt19937_64 rng(12);
  const auto s = SparseMatrix::from_dense(oracle::gaussian_matrix(rng, 60, 45));
  auto o = opts(7, 3, 99);
  const auto first = truncated_svd(s, o);
  o.threads = 3;
  const auto second = truncated_svd(s, o);
  CHECK(first.U == second.U);
  CHECK(first.S == second.S);
  CHECK(first.V == second.V);
  o.seed = 100;
  const auto other_seed = truncated_svd(s, o);
  CHECK(other_seed.S.isApprox(first.S, 1e-2));
}

TEST_CASE("sigma weighting") {
  SvdResult r;
  r.U = Eigen::MatrixXd::Identity(3, 2);
  r.S = Eigen::Vector2d(4, 1);
  r.V = Eigen::MatrixXd::Identity(3, 2);
  r.rank = 2;
  const auto none = extract_embeddings(r, SigmaWeighting::kNone);
  CHECK(none == r.U);
  const auto half = extract_embeddings(r, SigmaWeighting::kHalf);
  CHECK(half(0, 0) == 2.0);
  CHECK(half(1, 1) == 1.0);
  const auto full = extract_embeddings(r, SigmaWeighting::kFull);
  CHECK(full(0, 0) == 4.0);
  CHECK(parse_sigma_weighting("half") == SigmaWeighting::kHalf);
  CHECK(oracle::error_kind([] { parse_sigma_weighting("quarter"); }) == ErrorKind::kConfig);
}

TEST_CASE("sparse multiply matches dense") {
  std::mt19937_64 rng(3);
  Eigen::MatrixXd a = oracle::gaussian_matrix(rng, 25, 17);
  for (int i = 0; i < a.size(); ++i) {
    if (i % 3) a.data()[i] = 0;
  }
  const auto s = SparseMatrix::from_dense(a);
  const auto x = oracle::gaussian_matrix(rng, 17, 4);
  CHECK((s.multiply(x, 1) - a * x).norm() < 1e-12);
  CHECK(s.multiply(x, 4) == s.multiply(x, 1));
  CHECK(s.transpose().to_dense() == a.transpose());
}
