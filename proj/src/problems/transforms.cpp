#include "transforms.hpp"

#include <cmath>

namespace metabbo::problems::detail {

double osz(double x) {
  if (x == 0.0) return 0.0;
  const double xh = std::log(std::fabs(x));
  const double c1 = x > 0.0 ? 10.0 : 5.5;
  const double c2 = x > 0.0 ? 7.9 : 3.1;
  const double mag = std::exp(xh + 0.049 * (std::sin(c1 * xh) + std::sin(c2 * xh)));
  return x > 0.0 ? mag : -mag;
}

void osz(std::span<double> x) {
  for (double& v : x) v = osz(v);
}

void asy(std::span<double> x, double beta) {
  const double denom = static_cast<double>(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) {
      x[i] = std::pow(x[i], 1.0 + beta * (static_cast<double>(i) / denom) * std::sqrt(x[i]));
    }
  }
}

void scale_condition(std::span<double> x, double alpha) {
  const double denom = static_cast<double>(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] *= std::pow(alpha, 0.5 * static_cast<double>(i) / denom);
  }
}

double boundary_penalty(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) {
    const double excess = std::fabs(v) - 5.0;
    if (excess > 0.0) acc += excess * excess;
  }
  return acc;
}

}  // namespace metabbo::problems::detail
