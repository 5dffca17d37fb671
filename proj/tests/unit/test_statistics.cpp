#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "expect.hpp"
#include "oracles.hpp"
#include "sifaudit/statistics.hpp"

using namespace sifaudit;
using V = std::vector<double>;

TEST_CASE("ranks with ties") {
  CHECK(average_ranks(V{10, 20, 20, 5}) == V{2, 3.5, 3.5, 1});
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    V v(30);
    for (auto& x : v) x = static_cast<double>(rng() % 7);
    CHECK(average_ranks(v) == oracle::naive_ranks(v));
  }
}

TEST_CASE("pearson and spearman") {
  const V x{1, 2, 3, 4, 5};
  V y;
  for (double v : x) y.push_back(2 * v + 3);
  CHECK(pearson(x, y) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman(x, V{5, 4, 3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));

  // Hand data: x = 1..5, y = 2,1,4,3,5. Sxy = 8, Sxx = Syy = 10, r = 0.8.
  const V hy{2, 1, 4, 3, 5};
  CHECK(std::abs(pearson(x, hy) - 0.8) <= 1e-12);
  CHECK(std::abs(spearman(x, hy) - 0.8) <= 1e-12);

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int t = 0; t < 10; ++t) {
    V a(40), b(40);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = g(rng);
      b[i] = a[i] + g(rng);
    }
    CHECK(pearson(a, b) == doctest::Approx(oracle::naive_pearson(a, b)).epsilon(1e-12));
    CHECK(spearman(a, b) ==
          doctest::Approx(oracle::naive_pearson(oracle::naive_ranks(a), oracle::naive_ranks(b))).epsilon(1e-12));
  }
}

TEST_CASE("correlation errors") {
  CHECK(oracle::error_kind([] { pearson(V{1, 2, 3}, V{4, 4, 4}); }) == ErrorKind::kDegenerate);
  CHECK(oracle::error_kind([] { pearson(V{1}, V{2}); }) == ErrorKind::kParameter);
  CHECK(oracle::error_kind([] { pearson(V{1, 2}, V{2}); }) == ErrorKind::kParameter);
}

TEST_CASE("Wilcoxon worked example") {
  const V y{0.3, 1.7, 2.2, 5.0, 0.0, 9.1};
  V x;
  for (double v : y) x.push_back(v + 1);
  const auto r = wilcoxon_one_sided(x, y);
  CHECK(r.w_plus == 21.0);
  CHECK(r.p_one_sided == 1.0 / 64.0);
  CHECK(r.method == WilcoxonMethod::kExact);
  CHECK_FALSE(r.degenerate);

  const auto same = wilcoxon_one_sided(y, y);
  CHECK(same.degenerate);
  CHECK(same.p_one_sided == 1.0);
}

TEST_CASE("Wilcoxon exact equals enumeration") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int t = 0; t < 10; ++t) {
      V x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = g(rng);
        // Rounded shifts make ties and zero differences common.
        x[i] = y[i] + std::round(g(rng) * 2 + 0.3) / 2;
      }
      const auto r = wilcoxon_one_sided(x, y);
      CHECK(std::abs(r.p_one_sided - oracle::wilcoxon_enumerate(x, y)) <= 1e-12);
    }
  }
}

TEST_CASE("normal approximation tracks the exact tail at n = 25") {
  std::vector<double> ranks;
  for (int i = 1; i <= 25; ++i) ranks.push_back(i);
  for (double w : {200.0, 230.0, 260.0, 290.0}) {
    const double exact = wilcoxon_exact_upper_tail(ranks, w);
    const double approx = wilcoxon_normal_upper_tail(ranks, w);
    CHECK(std::abs(exact - approx) < 5e-3);
  }
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  V x(40), y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    y[i] = g(rng);
    x[i] = y[i] + 0.5 + g(rng);
  }
  const auto r = wilcoxon_one_sided(x, y);
  CHECK(r.method == WilcoxonMethod::kNormalApproximation);
  CHECK(r.p_one_sided < 0.05);
}
