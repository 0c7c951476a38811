#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "metabbo/error.hpp"
#include "metabbo/metrics.hpp"

namespace metabbo::metrics {

namespace {

struct Pooled {
  std::vector<int> doubled_ranks;  // 2 * midrank, integral
  std::vector<std::size_t> tie_sizes;
};

// Doubled midranks of a ++ b, in that order.
Pooled pooled_ranks(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() + b.size();
  std::vector<double> values(a.begin(), a.end());
  values.insert(values.end(), b.begin(), b.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  Pooled out;
  out.doubled_ranks.assign(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Ranks i+1 .. j+1 share the midrank (i + j + 2) / 2.
    const int doubled = static_cast<int>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) out.doubled_ranks[order[k]] = doubled;
    out.tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  return out;
}

void check_sizes(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error(Errc::insufficient_data, "rank-sum test needs two samples of size >= 2");
  for (double v : a) {
    if (std::isnan(v)) throw Error(Errc::domain, "NaN in rank-sum sample");
  }
  for (double v : b) {
    if (std::isnan(v)) throw Error(Errc::domain, "NaN in rank-sum sample");
  }
}

}  // namespace

RankSumResult rank_sum_exact(std::span<const double> a, std::span<const double> b) {
  check_sizes(a, b);
  const Pooled pooled = pooled_ranks(a, b);
  const std::size_t n1 = a.size();
  const std::size_t n = pooled.doubled_ranks.size();
  const int max_sum = std::accumulate(pooled.doubled_ranks.begin(), pooled.doubled_ranks.end(), 0);

  // ways[k][s]: number of k-subsets of the pooled items with doubled rank sum s.
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t item = 0; item < n; ++item) {
    const int r = pooled.doubled_ranks[item];
    for (std::size_t k = std::min(n1, item + 1); k >= 1; --k) {
      for (int s = max_sum; s >= r; --s) ways[k][static_cast<std::size_t>(s)] += ways[k - 1][static_cast<std::size_t>(s - r)];
    }
  }

  int observed = 0;
  for (std::size_t i = 0; i < n1; ++i) observed += pooled.doubled_ranks[i];
  const long expected = static_cast<long>(n1) * static_cast<long>(n + 1);  // doubled mean
  const long deviation = std::labs(observed - expected);
  double extreme = 0.0;
  double total = 0.0;
  for (int s = 0; s <= max_sum; ++s) {
    const double w = ways[n1][static_cast<std::size_t>(s)];
    total += w;
    if (std::labs(s - expected) >= deviation) extreme += w;
  }
  return {std::min(1.0, extreme / total), true, observed / 2.0};
}

RankSumResult rank_sum_normal(std::span<const double> a, std::span<const double> b) {
  check_sizes(a, b);
  const Pooled pooled = pooled_ranks(a, b);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w += pooled.doubled_ranks[i] / 2.0;
  double tie_term = 0.0;
  for (std::size_t t : pooled.tie_sizes) {
    const double tt = static_cast<double>(t);
    tie_term += tt * tt * tt - tt;
  }
  const double variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  const double expected = n1 * (n + 1.0) / 2.0;
  if (variance <= 0.0) return {1.0, false, w};
  const double numerator = std::max(0.0, std::fabs(w - expected) - 0.5);
  const double z = numerator / std::sqrt(variance);
  return {std::min(1.0, std::erfc(z / std::sqrt(2.0))), false, w};
}

RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() <= kExactRankSumLimit && b.size() <= kExactRankSumLimit) return rank_sum_exact(a, b);
  return rank_sum_normal(a, b);
}

char to_symbol(Mark m) noexcept {
  switch (m) {
    case Mark::better: return '+';
    case Mark::worse: return '-';
    case Mark::equal: return '=';
  }
  return '=';
}

ComparisonMark wilcoxon_ranksum(std::span<const double> a, std::span<const double> b, double alpha) {
  const RankSumResult r = rank_sum_test(a, b);
  ComparisonMark out;
  out.p_value = r.p_value;
  if (r.p_value < alpha) {
    const double ma = mean(a);
    const double mb = mean(b);
    if (ma < mb) {
      out.mark = Mark::better;
    } else if (ma > mb) {
      out.mark = Mark::worse;
    }
  }
  return out;
}

}  // namespace metabbo::metrics
