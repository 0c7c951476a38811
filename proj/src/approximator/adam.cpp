#include <cmath>

#include "metabbo/approximator.hpp"
#include "metabbo/error.hpp"

namespace metabbo::approximator {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (params.size() != grads.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw Error(Errc::dimension_mismatch, "adam: parameter, gradient and moment shapes differ");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) throw Error(Errc::numeric, "adam: non-finite gradient");
  }
  const AdamConfig& c = state.config;
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = c.beta1 * m + (1.0 - c.beta1) * grads[i];
    v = c.beta2 * v + (1.0 - c.beta2) * grads[i] * grads[i];
    params[i] -= c.lr * (m / bias1) / (std::sqrt(v / bias2) + c.epsilon);
  }
}

}  // namespace metabbo::approximator
