#pragma once

// Dense feed-forward networks with exact backpropagation, plus Adam.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "metabbo/matrix.hpp"
#include "metabbo/rng.hpp"

namespace metabbo::approximator {

enum class Activation { identity, relu, tanh, sigmoid };

std::string_view to_string(Activation a) noexcept;
Activation parse_activation(std::string_view text);

/// Fully connected network. Parameters live in one flat buffer, laid out per
/// layer as the row-major (out x in) weight matrix followed by the biases.
class DenseNet {
 public:
  DenseNet() = default;

  /// `activations[l]` applies to layer l + 1; sizes.size() == activations.size() + 1.
  /// Parameters are zero; see `initialize`.
  DenseNet(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations);

  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  void initialize(Rng& rng);

  std::size_t input_size() const noexcept { return sizes_.front(); }
  std::size_t output_size() const noexcept { return sizes_.back(); }
  std::size_t num_layers() const noexcept { return activations_.size(); }
  std::size_t num_parameters() const noexcept { return params_.size(); }
  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  const std::vector<Activation>& activations() const noexcept { return activations_; }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  double& weight(std::size_t layer, std::size_t out, std::size_t in);
  double& bias(std::size_t layer, std::size_t out);

  Vector forward(std::span<const double> input) const;

  /// Adds dL/dparams into `param_grad` (length num_parameters()) for the loss
  /// whose gradient with respect to the output is `output_gradient`, and
  /// returns dL/dinput. Recomputes the forward pass internally.
  Vector backward_accumulate(std::span<const double> input, std::span<const double> output_gradient,
                             std::span<double> param_grad) const;

  struct Gradients {
    Vector parameters;
    Vector input;
  };
  Gradients backward(std::span<const double> input, std::span<const double> output_gradient) const;

  bool all_finite() const noexcept;

  friend bool operator==(const DenseNet&, const DenseNet&) = default;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return offsets_[layer] + sizes_[layer + 1] * sizes_[layer]; }

  std::vector<std::size_t> sizes_;
  std::vector<Activation> activations_;
  std::vector<std::size_t> offsets_;
  Vector params_;
};

/// Convenience: `hidden` relu layers between input and a head with `head` activation.
DenseNet make_mlp(std::size_t inputs, std::span<const std::size_t> hidden, std::size_t outputs, Activation head);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct AdamState {
  AdamConfig config;
  Vector first_moment;
  Vector second_moment;
  std::uint64_t t = 0;

  AdamState() = default;
  AdamState(std::size_t num_parameters, AdamConfig cfg)
      : config(cfg), first_moment(num_parameters, 0.0), second_moment(num_parameters, 0.0) {}

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// Bias-corrected adaptive-moment step. Throws numeric error, leaving both
/// params and state untouched, if any gradient is non-finite.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace metabbo::approximator
