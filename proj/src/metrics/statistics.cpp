#include <algorithm>
#include <cmath>
#include <numeric>

#include "metabbo/error.hpp"
#include "metabbo/metrics.hpp"

namespace metabbo::metrics {

double mean(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::empty_input, "mean of an empty list");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::empty_input, "stddev of an empty list");
  if (values.size() == 1) return 0.0;
  const double m = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

MetaAggregate aggregate_meta(std::span<const double> perfs) {
  if (perfs.empty()) throw Error(Errc::empty_input, "no performances to aggregate");
  const auto [lo, hi] = std::minmax_element(perfs.begin(), perfs.end());
  return {mean(perfs), *hi, *lo};
}

double meta_objective(std::span<const double> perf_per_problem) {
  if (perf_per_problem.empty()) throw Error(Errc::empty_input, "meta-objective needs at least one problem");
  return mean(perf_per_problem);
}

const PerformanceRow& PerformanceTable::add_row(int function_id, int dim, Membership membership,
                                                std::vector<double> values) {
  PerformanceRow row;
  row.function_id = function_id;
  row.dim = dim;
  row.membership = membership;
  row.v_avg = mean(values);
  row.v_std = sample_stddev(values);
  row.values = std::move(values);
  rows_.push_back(std::move(row));
  return rows_.back();
}

const PerformanceRow* PerformanceTable::find(int function_id, int dim) const {
  for (const auto& r : rows_) {
    if (r.function_id == function_id && r.dim == dim) return &r;
  }
  return nullptr;
}

PerformanceTable PerformanceTable::filter_dim(int dim) const {
  PerformanceTable out;
  for (const auto& r : rows_) {
    if (r.dim == dim) out.rows_.push_back(r);
  }
  return out;
}

}  // namespace metabbo::metrics
