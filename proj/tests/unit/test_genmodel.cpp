#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "expect.hpp"
#include "oracles.hpp"
#include "sifaudit/genmodel.hpp"

using namespace sifaudit;
using namespace sifaudit::genmodel;

namespace {

GenModelParams hand_model(double alpha) {
  Eigen::MatrixXd w(3, 2);
  w << 1.0, 0.0, 0.0, 1.0, -1.0, -1.0;
  Eigen::VectorXd c0(2);
  c0 << 1.0, 0.0;
  return GenModelParams(w, {0.5, 0.3, 0.2}, alpha, 0.0, c0);
}

// Direct evaluation, no log-space tricks.
double direct_emission(const GenModelParams& m, TokenId w, const Eigen::VectorXd& c) {
  double z = 0;
  for (int i = 0; i < m.word_vectors().rows(); ++i) z += std::exp(m.word_vectors().row(i).dot(c));
  return m.alpha() * m.p()[w] + (1 - m.alpha()) * std::exp(m.word_vectors().row(w).dot(c)) / z;
}

Eigen::VectorXd finite_difference(const std::vector<TokenId>& s, const GenModelParams& m, double h) {
  Eigen::VectorXd g(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m.dim());
    e(i) = h;
    g(i) = (sentence_loglik(s, e, m) - sentence_loglik(s, -e, m)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("emission probability limits") {
  const auto m = hand_model(1.0);
  Eigen::VectorXd c(2);
  c << 0.0, 0.7;
  const auto ctx = SmoothedContext::make(c, m.c0(), m.beta());
  for (TokenId w = 0; w < 3; ++w) CHECK(emission_prob(w, ctx, m) == m.p()[w]);

  Eigen::MatrixXd same = Eigen::MatrixXd::Ones(4, 3);
  Eigen::VectorXd c0 = Eigen::VectorXd::Unit(3, 0);
  const GenModelParams uniform(same, {0.4, 0.3, 0.2, 0.1}, 0.0, 0.3, c0);
  Eigen::VectorXd raw(3);
  raw << 0.2, -1.0, 2.0;
  const auto uctx = SmoothedContext::make(raw, c0, 0.3);
  for (TokenId w = 0; w < 4; ++w) CHECK(emission_prob(w, uctx, uniform) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("emission probability hand computation") {
  const auto m = hand_model(0.5);
  Eigen::VectorXd raw(2);
  raw << 0.0, 0.8;
  const auto ctx = SmoothedContext::make(raw, m.c0(), 0.0);
  // c~ = (0, 0.8): scores 0, 0.8, -0.8.
  const double z = 1.0 + std::exp(0.8) + std::exp(-0.8);
  CHECK(emission_prob(0, ctx, m) == doctest::Approx(0.25 + 0.5 / z).epsilon(1e-14));
  CHECK(emission_prob(1, ctx, m) == doctest::Approx(0.15 + 0.5 * std::exp(0.8) / z).epsilon(1e-14));
  CHECK(emission_prob(2, ctx, m) == doctest::Approx(0.10 + 0.5 * std::exp(-0.8) / z).epsilon(1e-14));
}

TEST_CASE("smoothed context projects off c0") {
  Eigen::VectorXd c0(3);
  c0 << 0.0, 0.6, 0.8;
  Eigen::VectorXd raw(3);
  raw << 1.0, 2.0, -1.0;
  const auto ctx = SmoothedContext::make(raw, c0, 0.25);
  CHECK(std::abs(ctx.c.dot(c0)) < 1e-14);
  CHECK((ctx.c_tilde - (0.25 * c0 + 0.75 * ctx.c)).norm() < 1e-15);
}

TEST_CASE("emission normalizes and never overflows") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto m = make_toy_genmodel(seed, 6, 40);
    std::mt19937_64 rng(seed);
    for (double scale : {0.0, 1.0, 50.0, 1e4}) {
      Eigen::VectorXd raw = oracle::gaussian_matrix(rng, 6, 1).col(0) * scale;
      const auto ctx = SmoothedContext::make(raw, m.c0(), m.beta());
      double total = 0;
      for (TokenId w = 0; w < m.n(); ++w) {
        const double p = emission_prob(w, ctx, m);
        CHECK(std::isfinite(p));
        total += p;
      }
      CHECK(std::abs(total - 1.0) <= 1e-9);
      if (scale <= 1.0) {
        CHECK(emission_prob(5, ctx, m) == doctest::Approx(direct_emission(m, 5, ctx.c_tilde)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("parameter validation") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(2, 2);
  Eigen::VectorXd c0 = Eigen::VectorXd::Unit(2, 0);
  CHECK(oracle::error_kind([&] { GenModelParams(w, {0.5, 0.5}, 1.5, 0.0, c0); }) == ErrorKind::kParameter);
  CHECK(oracle::error_kind([&] { GenModelParams(w, {0.5, 0.5}, 0.5, -0.1, c0); }) == ErrorKind::kParameter);
  CHECK(oracle::error_kind([&] { GenModelParams(w, {0.5}, 0.5, 0.0, c0); }) == ErrorKind::kParameter);
  CHECK(oracle::error_kind([&] { GenModelParams(w, {0.5, 0.5}, 0.5, 0.0, 2 * c0); }) == ErrorKind::kParameter);
}

TEST_CASE("alpha lower bound") {
  const auto big = alpha_lower_bound(100000, 1e-3);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8f", big.alpha_min);
  CHECK(std::string(buf) == "0.99999999");
  CHECK(alpha_lower_bound(1, 1e-3).alpha_min == doctest::Approx(1000.0 / 1001.0).epsilon(1e-15));
  CHECK(alpha_lower_bound(1, 1e12).alpha_min < 1e-11);
  double prev = 0;
  for (std::uint64_t n : {1ULL, 10ULL, 1000ULL, 100000ULL, 10000000ULL}) {
    const double a = alpha_lower_bound(n, 1e-3).alpha_min;
    CHECK(a > prev);
    prev = a;
  }
  CHECK(oracle::error_kind([] { alpha_lower_bound(0, 1e-3); }) == ErrorKind::kParameter);
  CHECK(oracle::error_kind([] { alpha_lower_bound(10, 0.0); }) == ErrorKind::kParameter);
}

TEST_CASE("sentence log-likelihood") {
  const auto m = hand_model(0.5);
  const std::vector<TokenId> s{0, 2, 2};
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  double expected = 0;
  for (TokenId w : s) expected += std::log(0.5 * m.p()[w] + 0.5 / 3.0);
  CHECK(sentence_loglik(s, zero, m) == doctest::Approx(expected).epsilon(1e-14));

  Eigen::VectorXd c(2);
  c << 0.3, -0.4;
  double direct = 0;
  for (TokenId w : s) direct += std::log(direct_emission(m, w, c));
  CHECK(std::abs(sentence_loglik(s, c, m) - direct) <= 1e-12);

  const std::vector<TokenId> empty;
  CHECK(oracle::error_kind([&] { sentence_loglik(empty, zero, m); }) == ErrorKind::kParameter);
  CHECK(oracle::error_kind([&] { gradient_at_zero(empty, m); }) == ErrorKind::kParameter);
  const std::vector<TokenId> bad{7};
  CHECK(oracle::error_kind([&] { sentence_loglik(bad, zero, m); }) == ErrorKind::kIndex);
}

TEST_CASE("gradient at zero") {
  const auto unigram = hand_model(1.0);
  const std::vector<TokenId> s{0, 1};
  CHECK(gradient_at_zero(s, unigram).norm() == 0.0);

  Eigen::MatrixXd same = Eigen::MatrixXd::Constant(4, 3, 0.7);
  const GenModelParams flat(same, {0.4, 0.3, 0.2, 0.1}, 0.3, 0.0, Eigen::VectorXd::Unit(3, 0));
  CHECK(gradient_at_zero(s, flat).norm() < 1e-15);

  // d = 3, n = 5 against finite differences.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = make_toy_genmodel(seed, 3, 5);
    const std::vector<TokenId> sent{0, 3, 4, 3};
    const auto g = gradient_at_zero(sent, m);
    const auto fd = finite_difference(sent, m, 1e-5);
    CHECK((g - fd).norm() <= 1e-6 * g.norm());
  }
}

TEST_CASE("sphere argmax") {
  Eigen::Vector2d g(3, 4);
  const auto x = sphere_argmax(g);
  CHECK(x(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(x(1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK((sphere_argmax(g * 17.5) - x).norm() < 1e-15);
  CHECK(oracle::error_kind([] { sphere_argmax(Eigen::Vector3d::Zero()); }) == ErrorKind::kDegenerate);

  // No random unit vector beats it.
  std::mt19937_64 rng(6);
  const Eigen::VectorXd g5 = oracle::gaussian_matrix(rng, 5, 1).col(0);
  const double best = g5.dot(sphere_argmax(g5));
  for (int i = 0; i < 20000; ++i) {
    Eigen::VectorXd u = oracle::gaussian_matrix(rng, 5, 1).col(0);
    u.normalize();
    CHECK(g5.dot(u) <= best + 1e-12);
  }
}

TEST_CASE("linearization gap") {
  const auto unigram = hand_model(1.0);
  const std::vector<TokenId> s{0, 1, 2};
  CHECK(linearization_gap(s, unigram).gap == 0.0);

  const auto m = make_toy_genmodel(7, 10, 50);
  const std::vector<TokenId> sent{3, 17, 29, 41, 8};
  const auto far = linearization_gap(sent, m, 1.0);
  CHECK(far.gap > 0.0);
  CHECK(far.c_star.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(far.gap == doctest::Approx(std::abs(far.linear_value_at_cstar - far.true_value_at_cstar)));
  CHECK(linearization_gap(sent, m, 1e-6).gap <= 1e-9);
}

TEST_CASE("closed form special cases") {
  SifModelParams eq;
  eq.word_vectors = Eigen::MatrixXd::Identity(4, 4);
  eq.p = {0.25, 0.25, 0.25, 0.25};
  eq.a = 1e-3;
  const std::vector<TokenId> s{0, 2, 3};
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
  for (TokenId w : s) sum += eq.word_vectors.row(w).transpose();
  CHECK((sif_closed_form(s, eq) - sum.normalized()).norm() < 1e-15);

  SifModelParams single;
  single.word_vectors = Eigen::MatrixXd(2, 3);
  single.word_vectors << 1, 2, 2, 0, 1, 0;
  single.p = {0.9, 0.1};
  single.a = 1e6;
  const std::vector<TokenId> one{0};
  CHECK((sif_closed_form(one, single) - Eigen::Vector3d(1, 2, 2) / 3.0).norm() < 1e-15);
}

TEST_CASE("objective gradient matches finite differences") {
  const auto toy = make_toy_model(3);
  std::mt19937_64 rng(3);
  const Eigen::VectorXd c = oracle::gaussian_matrix(rng, 10, 1).col(0);
  for (bool frozen : {false, true}) {
    const auto g = sif_objective_gradient(toy.sentence, c, toy.sif, frozen);
    Eigen::VectorXd fd(10);
    for (int i = 0; i < 10; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(10);
      e(i) = 1e-5;
      fd(i) = (sif_objective(toy.sentence, c + e, toy.sif, frozen) -
               sif_objective(toy.sentence, c - e, toy.sif, frozen)) / 2e-5;
    }
    CHECK((g - fd).norm() <= 1e-6 * g.norm());
  }
}

TEST_CASE("MAP oracle on toy models") {
  std::size_t above = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto toy = make_toy_model(seed);
    MapOracleOptions o;
    o.seed = seed;
    const auto r = sif_map_oracle(toy.sentence, toy.sif, o);
    CHECK(r.linearized_deviation <= 1e-10);
    CHECK(r.numeric_argmax.norm() == doctest::Approx(1.0).epsilon(1e-12));
    if (r.cosine >= 0.95) ++above;
  }
  CHECK(above >= 18);

  const auto toy = make_toy_model(0);
  MapOracleOptions few;
  few.steps = 2;
  const auto r = sif_map_oracle(toy.sentence, toy.sif, few);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.warning.empty());
}

TEST_CASE("toy models are reproducible") {
  const auto a = make_toy_model(4);
  const auto b = make_toy_model(4);
  CHECK(a.sif.word_vectors == b.sif.word_vectors);
  CHECK(a.sentence == b.sentence);
  CHECK(a.sentence.size() == 5);
  CHECK(a.sif.word_vectors.rows() == 50);
  CHECK(a.sif.word_vectors.cols() == 10);
}
