#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "metabbo/error.hpp"
#include "metabbo/problems.hpp"
#include "transforms.hpp"

namespace metabbo::problems {

struct GallagherPeak {
  Vector center;     // R * y_i
  Vector precision;  // diagonal of C_i
  double weight = 0.0;
};

struct InstanceData {
  int function_id = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  Vector x_opt;
  double f_opt = 0.0;
  Matrix rot_r;
  Matrix rot_q;
  Vector signs;
  std::vector<GallagherPeak> peaks;
  double schwefel_offset = 0.0;
};

namespace {

using detail::asy;
using detail::boundary_penalty;
using detail::osz;
using detail::scale_condition;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSchwefelOptimum = 4.2096874633;

double rosenbrock_scale(std::size_t dim) {
  return std::max(1.0, std::sqrt(static_cast<double>(dim)) / 8.0);
}

double exponent_ratio(std::size_t i, std::size_t dim) {
  return static_cast<double>(i) / static_cast<double>(dim - 1);
}

Vector shifted(const InstanceData& d, std::span<const double> x) {
  Vector z(x.begin(), x.end());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] -= d.x_opt[i];
  return z;
}

double rastrigin_core(std::span<const double> z) {
  double cos_sum = 0.0;
  double sq = 0.0;
  for (double v : z) {
    cos_sum += std::cos(kTwoPi * v);
    sq += v * v;
  }
  return 10.0 * (static_cast<double>(z.size()) - cos_sum) + sq;
}

double ellipsoid_core(std::span<const double> z) {
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    acc += std::pow(10.0, 6.0 * exponent_ratio(i, z.size())) * z[i] * z[i];
  }
  return acc;
}

double rosenbrock_core(std::span<const double> z) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double a = z[i] * z[i] - z[i + 1];
    const double b = z[i] - 1.0;
    acc += 100.0 * a * a + b * b;
  }
  return acc;
}

double f_sphere(const InstanceData& d, std::span<const double> x) {
  const Vector z = shifted(d, x);
  return std::inner_product(z.begin(), z.end(), z.begin(), 0.0);
}

double f_ellipsoid_separable(const InstanceData& d, std::span<const double> x) {
  Vector z = shifted(d, x);
  osz(z);
  return ellipsoid_core(z);
}

double f_rastrigin_separable(const InstanceData& d, std::span<const double> x) {
  Vector z = shifted(d, x);
  osz(z);
  asy(z, 0.2);
  scale_condition(z, 10.0);
  return rastrigin_core(z);
}

double f_buche_rastrigin(const InstanceData& d, std::span<const double> x) {
  Vector z = shifted(d, x);
  osz(z);
  for (std::size_t i = 0; i < z.size(); ++i) {
    double s = std::pow(10.0, 0.5 * exponent_ratio(i, z.size()));
    if (z[i] > 0.0 && i % 2 == 0) s *= 10.0;
    z[i] *= s;
  }
  return rastrigin_core(z) + 100.0 * boundary_penalty(x);
}

double f_linear_slope(const InstanceData& d, std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xo = d.x_opt[i];
    const double s = (xo > 0.0 ? 1.0 : -1.0) * std::pow(10.0, exponent_ratio(i, x.size()));
    const double z = xo * x[i] < 25.0 ? x[i] : xo;
    acc += 5.0 * std::fabs(s) - s * z;
  }
  return acc;
}

double f_attractive_sector(const InstanceData& d, std::span<const double> x) {
  Vector z = d.rot_r.apply(shifted(d, x));
  scale_condition(z, 10.0);
  z = d.rot_q.apply(z);
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double s = z[i] * d.x_opt[i] > 0.0 ? 100.0 : 1.0;
    acc += (s * z[i]) * (s * z[i]);
  }
  return std::pow(osz(acc), 0.9);
}

double f_step_ellipsoid(const InstanceData& d, std::span<const double> x) {
  Vector zh = d.rot_r.apply(shifted(d, x));
  scale_condition(zh, 10.0);
  Vector zt(zh.size());
  for (std::size_t i = 0; i < zh.size(); ++i) {
    zt[i] = std::fabs(zh[i]) > 0.5 ? std::floor(0.5 + zh[i]) : std::floor(0.5 + 10.0 * zh[i]) / 10.0;
  }
  const Vector z = d.rot_q.apply(zt);
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    acc += std::pow(10.0, 2.0 * exponent_ratio(i, z.size())) * z[i] * z[i];
  }
  return 0.1 * std::max(std::fabs(zh[0]) / 1e4, acc) + boundary_penalty(x);
}

double f_rosenbrock(const InstanceData& d, std::span<const double> x) {
  Vector z = shifted(d, x);
  const double c = rosenbrock_scale(z.size());
  for (double& v : z) v = c * v + 1.0;
  return rosenbrock_core(z);
}

double f_rosenbrock_rotated(const InstanceData& d, std::span<const double> x) {
  Vector z = d.rot_r.apply(x);
  const double c = rosenbrock_scale(z.size());
  for (double& v : z) v = c * v + 0.5;
  return rosenbrock_core(z);
}

double f_ellipsoid(const InstanceData& d, std::span<const double> x) {
  Vector z = d.rot_r.apply(shifted(d, x));
  osz(z);
  return ellipsoid_core(z);
}

double f_discus(const InstanceData& d, std::span<const double> x) {
  Vector z = d.rot_r.apply(shifted(d, x));
  osz(z);
  double acc = 1e6 * z[0] * z[0];
  for (std::size_t i = 1; i < z.size(); ++i) acc += z[i] * z[i];
  return acc;
}

double f_bent_cigar(const InstanceData& d, std::span<const double> x) {
  Vector z = d.rot_r.apply(shifted(d, x));
  asy(z, 0.5);
  z = d.rot_r.apply(z);
  double rest = 0.0;
  for (std::size_t i = 1; i < z.size(); ++i) rest += z[i] * z[i];
  return z[0] * z[0] + 1e6 * rest;
}

double f_sharp_ridge(const InstanceData& d, std::span<const double> x) {
  Vector z = d.rot_r.apply(shifted(d, x));
  scale_condition(z, 10.0);
  z = d.rot_q.apply(z);
  double rest = 0.0;
  for (std::size_t i = 1; i < z.size(); ++i) rest += z[i] * z[i];
  return z[0] * z[0] + 100.0 * std::sqrt(rest);
}

double f_different_powers(const InstanceData& d, std::span<const double> x) {
  const Vector z = d.rot_r.apply(shifted(d, x));
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    acc += std::pow(std::fabs(z[i]), 2.0 + 4.0 * exponent_ratio(i, z.size()));
  }
  return std::sqrt(acc);
}

double f_rastrigin(const InstanceData& d, std::span<const double> x) {
  Vector z = d.rot_r.apply(shifted(d, x));
  osz(z);
  asy(z, 0.2);
  z = d.rot_q.apply(z);
  scale_condition(z, 10.0);
  z = d.rot_r.apply(z);
  return rastrigin_core(z);
}

double weierstrass_term(double zi) {
  double acc = 0.0;
  double amp = 1.0;
  double freq = 1.0;
  for (int k = 0; k < 12; ++k) {
    acc += amp * std::cos(kTwoPi * freq * (zi + 0.5));
    amp *= 0.5;
    freq *= 3.0;
  }
  return acc;
}

double f_weierstrass(const InstanceData& d, std::span<const double> x) {
  Vector z = d.rot_r.apply(shifted(d, x));
  osz(z);
  z = d.rot_q.apply(z);
  scale_condition(z, 0.01);
  z = d.rot_r.apply(z);
  const double f0 = weierstrass_term(0.0);
  double acc = 0.0;
  for (double v : z) acc += weierstrass_term(v);
  const double dimf = static_cast<double>(z.size());
  // Each term is bounded below by f0; the clamp absorbs cosine round-off.
  const double gap = std::max(0.0, acc / dimf - f0);
  return 10.0 * gap * gap * gap + 10.0 / dimf * boundary_penalty(x);
}

double schaffers(const InstanceData& d, std::span<const double> x, double conditioning) {
  Vector z = d.rot_r.apply(shifted(d, x));
  asy(z, 0.5);
  z = d.rot_q.apply(z);
  scale_condition(z, conditioning);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double s = std::sqrt(z[i] * z[i] + z[i + 1] * z[i + 1]);
    const double root = std::sqrt(s);
    const double wave = std::sin(50.0 * std::pow(s, 0.2));
    acc += root + root * wave * wave;
  }
  const double mean = acc / static_cast<double>(z.size() - 1);
  return mean * mean + 10.0 * boundary_penalty(x);
}

double f_schaffers10(const InstanceData& d, std::span<const double> x) { return schaffers(d, x, 10.0); }
double f_schaffers1000(const InstanceData& d, std::span<const double> x) { return schaffers(d, x, 1000.0); }

double f_griewank_rosenbrock(const InstanceData& d, std::span<const double> x) {
  Vector z = d.rot_r.apply(x);
  const double c = rosenbrock_scale(z.size());
  for (double& v : z) v = c * v + 0.5;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double a = z[i] * z[i] - z[i + 1];
    const double b = z[i] - 1.0;
    const double s = 100.0 * a * a + b * b;
    acc += s / 4000.0 - std::cos(s);
  }
  // s/4000 - cos(s) >= -1 for s >= 0, so the sum is bounded below by zero.
  return std::max(0.0, 10.0 * acc / static_cast<double>(z.size() - 1) + 10.0);
}

struct SchwefelParts {
  double wave_sum = 0.0;
  double penalty = 0.0;
};

SchwefelParts schwefel_parts(const InstanceData& d, std::span<const double> x) {
  const std::size_t n = x.size();
  Vector xh(n);
  for (std::size_t i = 0; i < n; ++i) xh[i] = 2.0 * d.signs[i] * x[i];
  Vector zh(xh);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    zh[i + 1] = xh[i + 1] + 0.25 * (xh[i] - 2.0 * std::fabs(d.x_opt[i]));
  }
  for (std::size_t i = 0; i < n; ++i) zh[i] -= 2.0 * std::fabs(d.x_opt[i]);
  scale_condition(zh, 10.0);
  SchwefelParts parts;
  Vector scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 100.0 * (zh[i] + 2.0 * std::fabs(d.x_opt[i]));
    parts.wave_sum += z * std::sin(std::sqrt(std::fabs(z)));
    scaled[i] = z / 100.0;
  }
  parts.penalty = boundary_penalty(scaled);
  return parts;
}

double f_schwefel(const InstanceData& d, std::span<const double> x) {
  const SchwefelParts parts = schwefel_parts(d, x);
  const double dimf = static_cast<double>(x.size());
  // The offset is the wave sum at the nominal optimum, so the minimum sits at
  // zero up to the accuracy of the tabulated optimum location.
  const double value = (d.schwefel_offset - parts.wave_sum) / (100.0 * dimf) + 100.0 * parts.penalty;
  return std::max(0.0, value);
}

double f_gallagher(const InstanceData& d, std::span<const double> x) {
  const Vector rx = d.rot_r.apply(x);
  const double dimf = static_cast<double>(x.size());
  double best = 0.0;
  for (const GallagherPeak& peak : d.peaks) {
    double q = 0.0;
    for (std::size_t j = 0; j < rx.size(); ++j) {
      const double diff = rx[j] - peak.center[j];
      q += peak.precision[j] * diff * diff;
    }
    best = std::max(best, peak.weight * std::exp(-q / (2.0 * dimf)));
  }
  const double t = osz(10.0 - best);
  return t * t + boundary_penalty(x);
}

double f_katsuura(const InstanceData& d, std::span<const double> x) {
  Vector z = d.rot_r.apply(shifted(d, x));
  scale_condition(z, 100.0);
  z = d.rot_q.apply(z);
  const double dimf = static_cast<double>(z.size());
  const double exponent = 10.0 / std::pow(dimf, 1.2);
  double prod = 1.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double acc = 0.0;
    double p = 2.0;
    for (int j = 1; j <= 32; ++j) {
      const double t = p * z[i];
      acc += std::fabs(t - std::round(t)) / p;
      p *= 2.0;
    }
    prod *= std::pow(1.0 + static_cast<double>(i + 1) * acc, exponent);
  }
  const double scale = 10.0 / (dimf * dimf);
  return scale * prod - scale + boundary_penalty(x);
}

double f_lunacek(const InstanceData& d, std::span<const double> x) {
  const std::size_t n = x.size();
  const double dimf = static_cast<double>(n);
  constexpr double mu0 = 2.5;
  const double s = 1.0 - 1.0 / (2.0 * std::sqrt(dimf + 20.0) - 8.2);
  const double mu1 = -std::sqrt((mu0 * mu0 - 1.0) / s);
  Vector xh(n);
  for (std::size_t i = 0; i < n; ++i) xh[i] = 2.0 * d.signs[i] * x[i];
  double sum0 = 0.0;
  double sum1 = 0.0;
  Vector centered(n);
  for (std::size_t i = 0; i < n; ++i) {
    sum0 += (xh[i] - mu0) * (xh[i] - mu0);
    sum1 += (xh[i] - mu1) * (xh[i] - mu1);
    centered[i] = xh[i] - mu0;
  }
  Vector z = d.rot_r.apply(centered);
  scale_condition(z, 100.0);
  z = d.rot_q.apply(z);
  double cos_sum = 0.0;
  for (double v : z) cos_sum += std::cos(kTwoPi * v);
  return std::min(sum0, dimf + s * sum1) + 10.0 * (dimf - cos_sum) + 1e4 * boundary_penalty(x);
}

using RawFunction = double (*)(const InstanceData&, std::span<const double>);

constexpr RawFunction kFunctions[kNumFunctions] = {
    f_sphere,           f_ellipsoid_separable, f_rastrigin_separable, f_buche_rastrigin,
    f_linear_slope,     f_attractive_sector,   f_step_ellipsoid,      f_rosenbrock,
    f_rosenbrock_rotated, f_ellipsoid,         f_discus,              f_bent_cigar,
    f_sharp_ridge,      f_different_powers,    f_rastrigin,           f_weierstrass,
    f_schaffers10,      f_schaffers1000,       f_griewank_rosenbrock, f_schwefel,
    f_gallagher,        f_gallagher,           f_katsuura,            f_lunacek,
};

constexpr const char* kNames[kNumFunctions] = {
    "Sphere",
    "Ellipsoidal",
    "Rastrigin",
    "Buche-Rastrigin",
    "Linear Slope",
    "Attractive Sector",
    "Step Ellipsoidal",
    "Rosenbrock",
    "Rosenbrock rotated",
    "Ellipsoidal rotated",
    "Discus",
    "Bent Cigar",
    "Sharp Ridge",
    "Different Powers",
    "Rastrigin rotated",
    "Weierstrass",
    "Schaffers F7",
    "Schaffers F7 ill-conditioned",
    "Composite Griewank-Rosenbrock F8F2",
    "Schwefel x*sin(x)",
    "Gallagher 101 peaks",
    "Gallagher 21 peaks",
    "Katsuura",
    "Lunacek bi-Rastrigin",
};

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
}

std::vector<GallagherPeak> make_peaks(InstanceData& d, std::size_t count, double first_alpha,
                                      double first_range, Rng& rng) {
  const std::size_t n = d.dim;
  std::vector<std::size_t> alpha_order(count - 1);
  std::iota(alpha_order.begin(), alpha_order.end(), std::size_t{0});
  shuffle(alpha_order, rng);

  std::vector<GallagherPeak> peaks(count);
  for (std::size_t p = 0; p < count; ++p) {
    Vector y(n);
    const double range = p == 0 ? first_range : 4.9;
    for (double& v : y) v = rng.uniform(-range, range);
    const double alpha =
        p == 0 ? first_alpha
               : std::pow(1000.0, 2.0 * static_cast<double>(alpha_order[p - 1]) / static_cast<double>(count - 2));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    shuffle(perm, rng);
    Vector precision(n);
    for (std::size_t j = 0; j < n; ++j) {
      precision[perm[j]] = std::pow(alpha, 0.5 * exponent_ratio(j, n)) / std::pow(alpha, 0.25);
    }
    peaks[p].center = d.rot_r.apply(y);
    peaks[p].precision = std::move(precision);
    peaks[p].weight = p == 0 ? 10.0 : 1.1 + 8.0 * static_cast<double>(p - 1) / static_cast<double>(count - 2);
    if (p == 0) d.x_opt = y;
  }
  return peaks;
}

}  // namespace

Matrix random_rotation(std::size_t dim, Rng& rng) {
  Matrix m(dim, dim);
  for (double& v : m.data()) v = rng.normal();
  for (std::size_t r = 0; r < dim; ++r) {
    auto row = m.row(r);
    for (std::size_t p = 0; p < r; ++p) {
      const auto prev = m.row(p);
      double dot = 0.0;
      for (std::size_t c = 0; c < dim; ++c) dot += row[c] * prev[c];
      for (std::size_t c = 0; c < dim; ++c) row[c] -= dot * prev[c];
    }
    double norm = 0.0;
    for (double v : row) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : row) v /= norm;
  }
  return m;
}

ProblemInstance make_bbob(int function_id, int dim, std::uint64_t instance_seed) {
  if (function_id < 1 || function_id > kNumFunctions) {
    throw Error(Errc::invalid_function, "BBOB function id must be in 1..24, got " + std::to_string(function_id));
  }
  if (dim < 2) {
    throw Error(Errc::invalid_dimension, "dimension must be at least 2, got " + std::to_string(dim));
  }
  auto data = std::make_shared<InstanceData>();
  data->function_id = function_id;
  data->dim = static_cast<std::size_t>(dim);
  data->seed = instance_seed;
  const std::size_t n = data->dim;

  Rng rng(combine_seed(combine_seed(static_cast<std::uint64_t>(function_id), n), instance_seed));
  data->f_opt = rng.uniform(-100.0, 100.0);
  data->x_opt.resize(n);
  for (double& v : data->x_opt) v = rng.uniform(-4.0, 4.0);
  data->rot_r = random_rotation(n, rng);
  data->rot_q = random_rotation(n, rng);
  data->signs.resize(n);
  for (double& v : data->signs) v = rng.uniform() < 0.5 ? -1.0 : 1.0;

  switch (function_id) {
    case 4:
      for (std::size_t i = 0; i < n; i += 2) data->x_opt[i] = std::fabs(data->x_opt[i]);
      break;
    case 5:
      for (std::size_t i = 0; i < n; ++i) data->x_opt[i] = 5.0 * data->signs[i];
      break;
    case 8:
      for (double& v : data->x_opt) v *= 0.75;
      break;
    case 9:
    case 19: {
      // Solve c * R x + 0.5 = 1 for x, i.e. x = R^T (0.5 / c).
      const double t = 0.5 / rosenbrock_scale(n);
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += data->rot_r(i, j) * t;
        data->x_opt[j] = acc;
      }
      break;
    }
    case 20:
      for (std::size_t i = 0; i < n; ++i) data->x_opt[i] = 0.5 * kSchwefelOptimum * data->signs[i];
      break;
    case 21:
      data->peaks = make_peaks(*data, 101, 1000.0, 4.0, rng);
      break;
    case 22:
      data->peaks = make_peaks(*data, 21, 1000.0 * 1000.0, 3.92, rng);
      break;
    case 24:
      for (std::size_t i = 0; i < n; ++i) data->x_opt[i] = 1.25 * data->signs[i];
      break;
    default:
      break;
  }
  if (function_id == 20) data->schwefel_offset = schwefel_parts(*data, data->x_opt).wave_sum;
  return ProblemInstance(std::move(data));
}

int ProblemInstance::function_id() const noexcept { return data_->function_id; }
std::size_t ProblemInstance::dim() const noexcept { return data_->dim; }
std::uint64_t ProblemInstance::instance_seed() const noexcept { return data_->seed; }
const Vector& ProblemInstance::x_opt() const noexcept { return data_->x_opt; }
double ProblemInstance::f_opt() const noexcept { return data_->f_opt; }

std::string ProblemInstance::name() const {
  return "BBOB_F" + std::to_string(data_->function_id) + "_D" + std::to_string(data_->dim);
}

double ProblemInstance::evaluate(std::span<const double> x) const {
  if (x.size() != data_->dim) {
    throw Error(Errc::dimension_mismatch,
                "expected " + std::to_string(data_->dim) + " coordinates, got " + std::to_string(x.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(Errc::domain, "non-finite coordinate");
  }
  return kFunctions[data_->function_id - 1](*data_, x) + data_->f_opt;
}

std::string function_name(int function_id) {
  if (function_id < 1 || function_id > kNumFunctions) {
    throw Error(Errc::invalid_function, "BBOB function id must be in 1..24");
  }
  return kNames[function_id - 1];
}

Matrix initialize_population(const ProblemInstance& problem, std::size_t size, Rng& rng) {
  if (size < 4) {
    throw Error(Errc::population_too_small, "population size must be at least 4, got " + std::to_string(size));
  }
  Matrix pop(size, problem.dim());
  for (double& v : pop.data()) v = rng.uniform(problem.lower_bound(), problem.upper_bound());
  return pop;
}

}  // namespace metabbo::problems
