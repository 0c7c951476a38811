#include <algorithm>
#include <string>

#include "metabbo/error.hpp"
#include "metabbo/metrics.hpp"

namespace metabbo::metrics {

double transferability_index(const PerformanceTable& table) {
  double seen_sum = 0.0;
  double unseen_sum = 0.0;
  std::size_t seen_n = 0;
  std::size_t unseen_n = 0;
  for (const auto& row : table.rows()) {
    if (row.membership == Membership::seen) {
      seen_sum += row.perf();
      ++seen_n;
    } else {
      unseen_sum += row.perf();
      ++unseen_n;
    }
  }
  if (seen_n == 0 || unseen_n == 0) throw Error(Errc::empty_group, "TI needs both seen and unseen rows");
  const double seen_mean = seen_sum / static_cast<double>(seen_n);
  const double unseen_mean = unseen_sum / static_cast<double>(unseen_n);
  if (seen_mean == 0.0) throw Error(Errc::degenerate, "mean seen performance is zero");
  return (unseen_mean - seen_mean) / seen_mean;
}

double generalization_index(const DeltaTable& delta, int train_dim, std::span<const int> diff_dims,
                            std::span<const int> seen) {
  if (diff_dims.empty()) throw Error(Errc::empty_input, "GI needs at least one test dimension");
  if (seen.empty()) throw Error(Errc::empty_group, "GI needs at least one seen function");
  auto lookup = [&](int fid, int dim) {
    const auto it = delta.find({fid, dim});
    if (it == delta.end()) {
      throw Error(Errc::incomplete_table,
                  "missing performance difference for F" + std::to_string(fid) + " D=" + std::to_string(dim));
    }
    return it->second;
  };
  double outer = 0.0;
  for (int j : diff_dims) {
    double inner = 0.0;
    for (int i : seen) inner += lookup(i, j) - lookup(i, train_dim);
    outer += inner / static_cast<double>(seen.size());
  }
  return outer / static_cast<double>(diff_dims.size());
}

}  // namespace metabbo::metrics
