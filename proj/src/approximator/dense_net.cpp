#include <algorithm>
#include <cmath>
#include <string>

#include "metabbo/approximator.hpp"
#include "metabbo/error.hpp"

namespace metabbo::approximator {

namespace {

double activate(Activation a, double z) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::tanh: return std::tanh(z);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

// Derivative expressed through the pre-activation z and activation value y.
double activate_derivative(Activation a, double z, double y) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: return 1.0 - y * y;
    case Activation::sigmoid: return y * (1.0 - y);
  }
  return 1.0;
}

}  // namespace

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
  }
  return "identity";
}

Activation parse_activation(std::string_view text) {
  for (Activation a : {Activation::identity, Activation::relu, Activation::tanh, Activation::sigmoid}) {
    if (text == to_string(a)) return a;
  }
  throw Error(Errc::parse, "unknown activation '" + std::string(text) + "'");
}

DenseNet::DenseNet(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations)
    : sizes_(std::move(layer_sizes)), activations_(std::move(activations)) {
  if (sizes_.size() < 2 || activations_.size() + 1 != sizes_.size()) {
    throw Error(Errc::dimension_mismatch, "network needs one activation per non-input layer");
  }
  if (std::find(sizes_.begin(), sizes_.end(), std::size_t{0}) != sizes_.end()) {
    throw Error(Errc::dimension_mismatch, "layer sizes must be positive");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

void DenseNet::initialize(Rng& rng) {
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    const std::size_t begin = weight_offset(l);
    const std::size_t end = bias_offset(l) + sizes_[l + 1];
    for (std::size_t p = begin; p < end; ++p) params_[p] = rng.uniform(-bound, bound);
  }
}

double& DenseNet::weight(std::size_t layer, std::size_t out, std::size_t in) {
  return params_[weight_offset(layer) + out * sizes_[layer] + in];
}

double& DenseNet::bias(std::size_t layer, std::size_t out) { return params_[bias_offset(layer) + out]; }

Vector DenseNet::forward(std::span<const double> input) const {
  if (input.size() != input_size()) {
    throw Error(Errc::dimension_mismatch, "network expects " + std::to_string(input_size()) + " inputs, got " +
                                              std::to_string(input.size()));
  }
  Vector a(input.begin(), input.end());
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const std::size_t in = sizes_[l];
    const std::size_t out = sizes_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    Vector next(out);
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) z += wr[i] * a[i];
      next[o] = activate(activations_[l], z);
    }
    a = std::move(next);
  }
  return a;
}

Vector DenseNet::backward_accumulate(std::span<const double> input, std::span<const double> output_gradient,
                                     std::span<double> param_grad) const {
  if (input.size() != input_size() || output_gradient.size() != output_size() ||
      param_grad.size() != num_parameters()) {
    throw Error(Errc::dimension_mismatch, "backward: shape mismatch");
  }
  const std::size_t layers = num_layers();
  std::vector<Vector> pre(layers);
  std::vector<Vector> post(layers + 1);
  post[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = sizes_[l];
    const std::size_t out = sizes_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    pre[l].resize(out);
    post[l + 1].resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) z += wr[i] * post[l][i];
      pre[l][o] = z;
      post[l + 1][o] = activate(activations_[l], z);
    }
  }

  Vector delta(output_gradient.begin(), output_gradient.end());
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = sizes_[l];
    const std::size_t out = sizes_[l + 1];
    for (std::size_t o = 0; o < out; ++o) {
      delta[o] *= activate_derivative(activations_[l], pre[l][o], post[l + 1][o]);
    }
    const double* w = params_.data() + weight_offset(l);
    double* gw = param_grad.data() + weight_offset(l);
    double* gb = param_grad.data() + bias_offset(l);
    Vector prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      gb[o] += d;
      const double* wr = w + o * in;
      double* gr = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        gr[i] += d * post[l][i];
        prev[i] += wr[i] * d;
      }
    }
    delta = std::move(prev);
  }
  return delta;
}

DenseNet::Gradients DenseNet::backward(std::span<const double> input, std::span<const double> output_gradient) const {
  Gradients g;
  g.parameters.assign(num_parameters(), 0.0);
  g.input = backward_accumulate(input, output_gradient, g.parameters);
  return g;
}

bool DenseNet::all_finite() const noexcept {
  return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

DenseNet make_mlp(std::size_t inputs, std::span<const std::size_t> hidden, std::size_t outputs, Activation head) {
  std::vector<std::size_t> sizes{inputs};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(outputs);
  std::vector<Activation> acts(hidden.size(), Activation::relu);
  acts.push_back(head);
  return DenseNet(std::move(sizes), std::move(acts));
}

}  // namespace metabbo::approximator
