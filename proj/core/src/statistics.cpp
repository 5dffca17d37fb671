#include "sifaudit/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sifaudit/error.hpp"

namespace sifaudit {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(ErrorKind::kParameter, "correlation inputs differ in length");
  if (x.size() < 2) raise(ErrorKind::kParameter, "correlation needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    raise(ErrorKind::kDegenerate, "correlation undefined: zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(ErrorKind::kParameter, "correlation inputs differ in length");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

std::string to_string(WilcoxonMethod method) {
  return method == WilcoxonMethod::kExact ? "exact" : "normal-approximation";
}

double wilcoxon_exact_upper_tail(std::span<const double> ranks, double w_plus) {
  // Counts of sign assignments by doubled rank sum; doubled ranks are integers.
  std::vector<long long> doubled;
  doubled.reserve(ranks.size());
  long long max_sum = 0;
  for (double r : ranks) {
    const double twice = 2.0 * r;
    if (std::abs(twice - std::round(twice)) > 1e-9 || r <= 0.0) {
      raise(ErrorKind::kParameter, "exact Wilcoxon needs positive integer or half-integer ranks");
    }
    doubled.push_back(std::llround(twice));
    max_sum += doubled.back();
  }
  std::vector<double> ways(static_cast<std::size_t>(max_sum) + 1, 0.0);
  ways[0] = 1.0;
  long long reach = 0;
  for (auto r : doubled) {
    for (long long s = reach; s >= 0; --s) {
      if (ways[static_cast<std::size_t>(s)] != 0.0) ways[static_cast<std::size_t>(s + r)] += ways[static_cast<std::size_t>(s)];
    }
    reach += r;
  }
  const long long threshold = std::llround(std::ceil(2.0 * w_plus - 1e-9));
  double upper = 0.0;
  for (long long s = std::max(0LL, threshold); s <= max_sum; ++s) upper += ways[static_cast<std::size_t>(s)];
  return std::min(1.0, std::ldexp(upper, -static_cast<int>(ranks.size())));
}

double wilcoxon_normal_upper_tail(std::span<const double> ranks, double w_plus) {
  const double n = static_cast<double>(ranks.size());
  if (ranks.empty()) return 1.0;
  const double mean = n * (n + 1.0) / 4.0;
  double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  std::map<double, std::size_t> ties;
  for (double r : ranks) ++ties[r];
  for (const auto& [rank, t] : ties) {
    const double td = static_cast<double>(t);
    variance -= (td * td * td - td) / 48.0;
  }
  if (variance <= 0.0) return w_plus >= mean ? 1.0 : 0.0;
  const double z = (w_plus - mean - 0.5) / std::sqrt(variance);
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

WilcoxonResult wilcoxon_one_sided(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(ErrorKind::kParameter, "Wilcoxon inputs differ in length");
  if (x.empty()) raise(ErrorKind::kParameter, "Wilcoxon test needs at least one pair");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult result;
  result.n_effective = diffs.size();
  if (diffs.empty()) {
    result.degenerate = true;
    result.p_one_sided = 1.0;
    return result;
  }
  std::vector<double> magnitudes(diffs.size());
  std::transform(diffs.begin(), diffs.end(), magnitudes.begin(), [](double d) { return std::abs(d); });
  const auto ranks = average_ranks(magnitudes);
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0.0) result.w_plus += ranks[i];
  }
  if (diffs.size() <= kWilcoxonExactLimit) {
    result.method = WilcoxonMethod::kExact;
    result.p_one_sided = wilcoxon_exact_upper_tail(ranks, result.w_plus);
  } else {
    result.method = WilcoxonMethod::kNormalApproximation;
    result.p_one_sided = wilcoxon_normal_upper_tail(ranks, result.w_plus);
  }
  return result;
}

}  // namespace sifaudit
