#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "metabbo/error.hpp"
#include "metabbo/metrics.hpp"

namespace metabbo::metrics {

namespace {

void check_front(const Front& f, const char* what) {
  if (f.empty()) throw Error(Errc::empty_input, std::string(what) + " is empty");
  const std::size_t m = f.front().size();
  for (const auto& p : f) {
    if (p.size() != m) throw Error(Errc::dimension_mismatch, std::string(what) + " mixes objective counts");
  }
}

double euclidean(const Vector& a, const Vector& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

double mean_nearest(const Front& from, const Front& to) {
  check_front(from, "front");
  check_front(to, "reference front");
  if (from.front().size() != to.front().size()) {
    throw Error(Errc::dimension_mismatch, "fronts have different objective counts");
  }
  double acc = 0.0;
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to) best = std::min(best, euclidean(p, q));
    acc += best;
  }
  return acc / static_cast<double>(from.size());
}

// Points strictly dominating `ref`, as (x, y) pairs.
double hypervolume_2d(std::vector<std::pair<double, double>> pts, double ref_x, double ref_y) {
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  double floor_y = ref_y;
  for (const auto& [x, y] : pts) {
    if (y < floor_y) {
      area += (ref_x - x) * (floor_y - y);
      floor_y = y;
    }
  }
  return area;
}

}  // namespace

double gd(const Front& approx, const Front& ref_front) { return mean_nearest(approx, ref_front); }

double igd(const Front& approx, const Front& ref_front) { return mean_nearest(ref_front, approx); }

double spacing(const Front& approx) {
  check_front(approx, "front");
  const std::size_t n = approx.size();
  if (n == 1) return 0.0;
  std::vector<double> d(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double l1 = 0.0;
      for (std::size_t k = 0; k < approx[i].size(); ++k) l1 += std::fabs(approx[i][k] - approx[j][k]);
      d[i] = std::min(d[i], l1);
    }
  }
  const double d_mean = mean(d);
  double acc = 0.0;
  for (double di : d) acc += (d_mean - di) * (d_mean - di);
  return std::sqrt(acc / static_cast<double>(n - 1));
}

double hypervolume(const Front& approx, const Vector& ref_point) {
  const std::size_t m = ref_point.size();
  if (m < 2 || m > 3) throw Error(Errc::unsupported_dimension, "hypervolume supports 2 or 3 objectives");
  for (const auto& p : approx) {
    if (p.size() != m) throw Error(Errc::dimension_mismatch, "point and reference point differ in length");
  }
  auto dominates_ref = [&](const Vector& p) {
    for (std::size_t i = 0; i < m; ++i) {
      if (!(p[i] < ref_point[i])) return false;
    }
    return true;
  };
  Front inside;
  for (const auto& p : approx) {
    if (dominates_ref(p)) inside.push_back(p);
  }
  if (inside.empty()) return 0.0;

  if (m == 2) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : inside) pts.emplace_back(p[0], p[1]);
    return hypervolume_2d(std::move(pts), ref_point[0], ref_point[1]);
  }

  // Slice along the third objective; each slab is a 2-D problem.
  std::sort(inside.begin(), inside.end(), [](const Vector& a, const Vector& b) { return a[2] < b[2]; });
  double volume = 0.0;
  std::vector<std::pair<double, double>> active;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    active.emplace_back(inside[i][0], inside[i][1]);
    const double next_z = i + 1 < inside.size() ? inside[i + 1][2] : ref_point[2];
    const double thickness = next_z - inside[i][2];
    if (thickness > 0.0) volume += thickness * hypervolume_2d(active, ref_point[0], ref_point[1]);
  }
  return volume;
}

}  // namespace metabbo::metrics
