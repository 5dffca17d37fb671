#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "expect.hpp"
#include "oracles.hpp"
#include "sifaudit/sentemb.hpp"
#include "sifaudit/sparse.hpp"
#include "sifaudit/svd.hpp"

using namespace sifaudit;

namespace {

EmbeddingMatrix make_vectors(std::vector<std::string> words, const Eigen::MatrixXd& m) {
  return EmbeddingMatrix(std::make_shared<const Vocabulary>(Vocabulary::from_tokens(std::move(words))), m);
}

using Words = std::vector<std::string>;

}  // namespace

TEST_CASE("average embedding") {
  Eigen::MatrixXd m(4, 2);
  m << 1, 2, -1, -2, 3, 0, 0, 6;
  const auto v = make_vectors({"a", "b", "c", "d"}, m);
  CHECK(embed_average(Words{"c"}, v, OovPolicy::kSkip).vector == Eigen::Vector2d(3, 0));
  CHECK(embed_average(Words{"a", "b"}, v, OovPolicy::kSkip).vector.norm() == 0.0);
  const auto mean = embed_average(Words{"a", "c", "d"}, v, OovPolicy::kSkip);
  CHECK(mean.vector(0) == doctest::Approx(4.0 / 3.0));
  CHECK(mean.vector(1) == doctest::Approx(8.0 / 3.0));
  const auto with_oov = embed_average(Words{"a", "zzz"}, v, OovPolicy::kSkip);
  CHECK(with_oov.vector == Eigen::Vector2d(1, 2));
  CHECK(with_oov.out_of_vocabulary == 1);
}

TEST_CASE("sentences without known words") {
  const auto v = make_vectors({"a"}, Eigen::MatrixXd::Ones(1, 3));
  CHECK(oracle::error_kind([&] { embed_average(Words{"x", "y"}, v, OovPolicy::kSkip); }) ==
        ErrorKind::kDegenerate);
  const auto z = embed_average(Words{"x"}, v, OovPolicy::kZero);
  CHECK(z.zero_fallback);
  CHECK(z.vector.norm() == 0.0);
  const std::vector<double> p{0.5};
  CHECK(embed_sif(Words{}, v, p, 1e-3, OovPolicy::kZero).zero_fallback);
}

TEST_CASE("SIF weights") {
  Eigen::MatrixXd m(3, 2);
  m << 1, 0, 0, 1, 2, 2;
  const auto v = make_vectors({"a", "b", "c"}, m);
  const std::vector<double> zero{0.0, 0.0, 0.0};
  const auto unit = embed_sif(Words{"a", "b"}, v, zero, 1e-3, OovPolicy::kSkip);
  CHECK(unit.vector == Eigen::Vector2d(0.5, 0.5));

  const std::vector<double> p{0.1, 0.001, 0.0};
  const auto two = embed_sif(Words{"a", "b"}, v, p, 1e-3, OovPolicy::kSkip);
  const double wa = 1e-3 / 0.101, wb = 0.5;
  CHECK(two.vector(0) == doctest::Approx(wa / 2).epsilon(1e-14));
  CHECK(two.vector(1) == doctest::Approx(wb / 2).epsilon(1e-14));

  const std::vector<double> same{0.3, 0.3, 0.3};
  const auto sif = embed_sif(Words{"a", "c"}, v, same, 1e-3, OovPolicy::kSkip).vector;
  const auto avg = embed_average(Words{"a", "c"}, v, OovPolicy::kSkip).vector;
  CHECK(sif.normalized().dot(avg.normalized()) == doctest::Approx(1.0).epsilon(1e-14));

  const std::vector<double> missing{0.1, std::numeric_limits<double>::quiet_NaN(), 0.0};
  const auto flagged = embed_sif(Words{"b"}, v, missing, 1e-3, OovPolicy::kSkip);
  CHECK(flagged.missing_frequency == 1);
  CHECK(flagged.vector == Eigen::Vector2d(0, 1));
}

TEST_CASE("SIF tends to Avg as a grows") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  Words words;
  for (int i = 0; i < 30; ++i) words.push_back("t" + std::to_string(i));
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = make_vectors(words, oracle::gaussian_matrix(rng, 30, 6));
    std::vector<double> p(30);
    for (auto& x : p) x = u(rng);
    Words sentence;
    for (int k = 0; k < 7; ++k) sentence.push_back(words[rng() % 30]);
    const auto sif = embed_sif(sentence, v, p, 1e6, OovPolicy::kSkip).vector;
    const auto avg = embed_average(sentence, v, OovPolicy::kSkip).vector;
    CHECK((sif - avg).norm() <= 1e-4 * avg.norm());
  }
}

TEST_CASE("principal component removal") {
  std::mt19937_64 rng(23);
  SentenceMatrix m;
  m.rows = oracle::gaussian_matrix(rng, 10, 4);
  const auto original = m.rows;

  CHECK(remove_principal_components(m, 0).rows == original);
  CHECK(oracle::error_kind([&] { remove_principal_components(m, 4); }) == ErrorKind::kParameter);

  const Eigen::VectorXd u1 = truncated_svd(SparseMatrix::from_dense(original), SvdOptions{1, 0, 10, 10, 1}).V.col(0);
  const auto once = remove_principal_components(m, 1);
  CHECK((once.rows * u1).cwiseAbs().maxCoeff() <= 1e-8);
  REQUIRE(once.removed_components.size() == 1);
  CHECK(std::abs(std::abs(once.removed_components[0].direction.dot(u1)) - 1.0) < 1e-8);

  const auto twice = remove_principal_components(once, 1);
  CHECK((twice.rows - once.rows).cwiseAbs().maxCoeff() <= 1e-8);

  SentenceMatrix identical;
  identical.rows = Eigen::MatrixXd::Ones(5, 3) * 2.5;
  CHECK(remove_principal_components(identical, 1).rows.cwiseAbs().maxCoeff() < 1e-12);

  const auto centered = remove_principal_components(m, 2, true);
  CHECK(centered.removed_components.size() == 2);
}

TEST_CASE("frequency alignment") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(3, 2);
  const auto v = make_vectors({"a", "b", "c"}, m);
  const auto counts = Vocabulary::from_entries({{"a", 3}, {"c", 1}});
  const auto aligned = align_frequencies(v, counts);
  CHECK(aligned.p[0] == doctest::Approx(0.75));
  CHECK(std::isnan(aligned.p[1]));
  CHECK(aligned.p[2] == doctest::Approx(0.25));
  CHECK(aligned.missing == 1);
}
