#pragma once

// The task environment: samples problems, drives the base optimizer with
// meta-actions, featurizes the search state and hands out rewards.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "metabbo/baseopt.hpp"
#include "metabbo/problems.hpp"
#include "metabbo/rng.hpp"

namespace metabbo::environment {

inline constexpr std::size_t kObservationLength = 8;
using Observation = std::array<double, kObservationLength>;

/// Feature slots, in order.
enum Feature : std::size_t {
  kBudgetUsed = 0,
  kLogError = 1,
  kLastImprovement = 2,
  kFitnessSpread = 3,
  kDiversity = 4,
  kStagnation = 5,
  kDimension = 6,
  kProgress = 7,
};

enum class Mode { train, test };

/// How the "distance to optimum" feature is estimated.
enum class ErrorProxy {
  known_optimum,  // best_f - f_opt
  blind,          // median population fitness - best_f
};

struct EnvConfig {
  problems::ProblemSplit split;
  std::size_t pop_size = baseopt::kDefaultPopSize;
  std::size_t max_steps_per_episode = 500;
  Mode mode = Mode::train;
  /// Instance seeds sampled from in train mode.
  std::vector<std::uint64_t> train_instances = {1, 2, 3, 4, 5};
  /// Problem used by every reset in test mode.
  std::optional<problems::ProblemInstance> designated;
  double solve_tolerance = 1e-8;
  ErrorProxy error_proxy = ErrorProxy::known_optimum;
};

struct FeatureContext {
  std::size_t step_index = 0;
  std::size_t max_steps = 1;
  std::size_t stagnation = 0;
  double last_improvement = 0.0;
  ErrorProxy error_proxy = ErrorProxy::known_optimum;
};

/// (prev - new) / (|prev| + 1e-12), clipped to [0, 1].
double compute_reward(double prev_best, double new_best);

Observation featurize(const baseopt::BaseOptimizerState& state, const problems::ProblemInstance& problem,
                      const FeatureContext& context);

struct StepResult {
  Observation observation{};
  double reward = 0.0;
  bool done = false;
  baseopt::BasePerformance performance;
};

class Environment {
 public:
  explicit Environment(EnvConfig config);

  /// Samples a problem (train: uniform over seen functions x dims x
  /// instances; test: the designated problem), initializes the optimizer.
  Observation reset(Rng& rng);

  /// One base-optimizer generation under `control`.
  StepResult step(const baseopt::BaseControl& control);

  bool done() const noexcept { return done_; }
  std::size_t step_index() const noexcept { return step_index_; }
  const EnvConfig& config() const noexcept { return config_; }
  const problems::ProblemInstance& problem() const;
  const baseopt::BaseOptimizerState& state() const noexcept { return state_; }
  const Observation& observation() const noexcept { return observation_; }

  /// best_f - f_opt, never negative.
  double best_error() const;
  double initial_best_error() const noexcept { return initial_error_; }

  /// Best-so-far error after each generation, starting at generation 0.
  const std::vector<double>& error_trace() const noexcept { return trace_; }

  /// Objective evaluations per function id since construction.
  const std::map<int, std::uint64_t>& evaluation_audit() const noexcept { return audit_; }

 private:
  const problems::ProblemInstance& sample_problem(Rng& rng);
  Observation observe() const;

  EnvConfig config_;
  std::map<std::tuple<int, int, std::uint64_t>, problems::ProblemInstance> cache_;
  std::optional<problems::ProblemInstance> problem_;
  baseopt::BaseOptimizerState state_;
  Rng rng_;
  Observation observation_{};
  std::size_t step_index_ = 0;
  std::size_t stagnation_ = 0;
  double last_improvement_ = 0.0;
  double initial_error_ = 0.0;
  bool started_ = false;
  bool done_ = false;
  std::vector<double> trace_;
  std::map<int, std::uint64_t> audit_;
};

}  // namespace metabbo::environment
