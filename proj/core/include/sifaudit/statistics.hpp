#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sifaudit {

/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Product-moment correlation. Throws kParameter for n < 2 or mismatched
/// lengths and kDegenerate for zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

enum class WilcoxonMethod { kExact, kNormalApproximation };

std::string to_string(WilcoxonMethod method);

struct WilcoxonResult {
  std::size_t n_effective = 0;  // pairs left after dropping zero differences
  double w_plus = 0.0;          // sum of ranks of positive differences
  double p_one_sided = 1.0;     // P(W+ >= observed) under the null
  WilcoxonMethod method = WilcoxonMethod::kExact;
  bool degenerate = false;      // every difference was zero
};

/// Largest n_effective for which the exact null distribution is used.
inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Paired signed-rank test of the alternative "x tends to exceed y".
/// Zero differences are discarded; |d| gets average ranks on ties.
WilcoxonResult wilcoxon_one_sided(std::span<const double> x, std::span<const double> y);

/// Upper tail P(W+ >= w_plus) when each rank independently carries a
/// positive sign with probability 1/2. Ranks must be integers or half-integers.
double wilcoxon_exact_upper_tail(std::span<const double> ranks, double w_plus);

/// Normal approximation to the same tail with tie and continuity corrections.
double wilcoxon_normal_upper_tail(std::span<const double> ranks, double w_plus);

}  // namespace sifaudit
