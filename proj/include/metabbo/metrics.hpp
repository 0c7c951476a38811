#pragma once

// Base- and meta-level performance metrics.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "metabbo/matrix.hpp"

namespace metabbo::metrics {

// --- single-objective aggregates -------------------------------------------

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for a single value.
double sample_stddev(std::span<const double> values);

struct MetaAggregate {
  double avg = 0.0;
  double best = 0.0;
  double worst = 0.0;
};

/// Mean, max and min of higher-is-better performances.
MetaAggregate aggregate_meta(std::span<const double> perfs);

/// Empirical estimate of the expected performance over the problem distribution.
double meta_objective(std::span<const double> perf_per_problem);

// --- performance tables, TI, GI --------------------------------------------

enum class Membership { seen, unseen };

struct PerformanceRow {
  int function_id = 0;
  int dim = 0;
  Membership membership = Membership::seen;
  std::vector<double> values;  // raw minimisation values, one per replication
  double v_avg = 0.0;
  double v_std = 0.0;

  /// Higher is better.
  double perf() const noexcept { return -v_avg; }
};

class PerformanceTable {
 public:
  const PerformanceRow& add_row(int function_id, int dim, Membership membership, std::vector<double> values);

  const std::vector<PerformanceRow>& rows() const noexcept { return rows_; }
  const PerformanceRow* find(int function_id, int dim) const;
  /// Rows with the given dimension, in insertion order.
  PerformanceTable filter_dim(int dim) const;

 private:
  std::vector<PerformanceRow> rows_;
};

/// (mean perf over unseen - mean perf over seen) / mean perf over seen,
/// evaluated literally on perf = -v_avg.
double transferability_index(const PerformanceTable& table);

using DeltaTable = std::map<std::pair<int, int>, double>;  // (function_id, dim) -> algorithm minus baseline perf

/// Mean over diff_dims of the mean over seen functions of
/// delta(i, j) - delta(i, train_dim).
double generalization_index(const DeltaTable& delta, int train_dim, std::span<const int> diff_dims,
                            std::span<const int> seen);

// --- significance -----------------------------------------------------------

enum class Mark { better, worse, equal };

char to_symbol(Mark m) noexcept;

struct ComparisonMark {
  Mark mark = Mark::equal;
  double p_value = 1.0;

  char symbol() const noexcept { return to_symbol(mark); }
};

struct RankSumResult {
  double p_value = 1.0;
  bool exact = false;
  double statistic = 0.0;  // rank sum of the first sample (midranks)
};

inline constexpr std::size_t kExactRankSumLimit = 8;
inline constexpr double kDefaultAlpha = 0.05;

/// Two-sided rank-sum test with midranks. Exact null distribution when both
/// samples have at most 8 values, normal approximation with tie and
/// continuity correction otherwise.
RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b);
RankSumResult rank_sum_exact(std::span<const double> a, std::span<const double> b);
RankSumResult rank_sum_normal(std::span<const double> a, std::span<const double> b);

/// Marks `a` (lower is better) against `b`: "+" if significantly better,
/// "-" if significantly worse, "=" otherwise.
ComparisonMark wilcoxon_ranksum(std::span<const double> a, std::span<const double> b,
                                double alpha = kDefaultAlpha);

// --- multi-objective indicators --------------------------------------------

using Front = std::vector<Vector>;

/// Mean distance from each approximation point to its nearest reference point.
double gd(const Front& approx, const Front& ref_front);
/// Mean distance from each reference point to its nearest approximation point.
double igd(const Front& approx, const Front& ref_front);
/// Schott's spacing with city-block nearest-neighbour distances; 0 for a single point.
double spacing(const Front& approx);
/// Exact dominated hypervolume for 2 or 3 objectives (minimisation).
double hypervolume(const Front& approx, const Vector& ref_point);

}  // namespace metabbo::metrics
