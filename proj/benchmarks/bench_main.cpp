#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "sifaudit/cooccurrence.hpp"
#include "sifaudit/matrix_builder.hpp"
#include "sifaudit/sentemb.hpp"
#include "sifaudit/statistics.hpp"
#include "sifaudit/svd.hpp"

using namespace sifaudit;

namespace {

std::vector<TokenId> zipf_stream(std::size_t length, std::uint32_t n) {
  std::mt19937_64 rng(1);
  std::vector<double> w(n);
  for (std::uint32_t i = 0; i < n; ++i) w[i] = 1.0 / (i + 1);
  std::discrete_distribution<TokenId> d(w.begin(), w.end());
  std::vector<TokenId> ids(length);
  for (auto& id : ids) id = d(rng);
  return ids;
}

void BM_CountCooccurrences(benchmark::State& state) {
  const auto ids = zipf_stream(static_cast<std::size_t>(state.range(0)), 5000);
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_cooccurrences(ids, 5000, WindowConfig{5}, threads));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CountCooccurrences)->Args({200000, 1})->Args({200000, 4})->Unit(benchmark::kMillisecond);

void BM_TruncatedSvd(benchmark::State& state) {
  const auto ids = zipf_stream(300000, 3000);
  const auto target = build_shifted_pmi(count_cooccurrences(ids, 3000, WindowConfig{5}), 1.0, true);
  SvdOptions o;
  o.rank = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(truncated_svd(target, o));
}
BENCHMARK(BM_TruncatedSvd)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_WilcoxonExact(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = g(rng);
    x[i] = y[i] + 0.2 + g(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(wilcoxon_one_sided(x, y));
}
BENCHMARK(BM_WilcoxonExact)->Arg(12)->Arg(25);

void BM_PrincipalComponentRemoval(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  SentenceMatrix m;
  m.rows = Eigen::MatrixXd::NullaryExpr(2000, 300, [&] { return g(rng); });
  for (auto _ : state) benchmark::DoNotOptimize(remove_principal_components(m, 1));
}
BENCHMARK(BM_PrincipalComponentRemoval)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
