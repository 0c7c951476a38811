#pragma once

// Meta-optimizers: the getAction / getActionWithExploration / learn / reset
// contract and the three baselines built on it.

#include <array>
#include <cstddef>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "metabbo/approximator.hpp"
#include "metabbo/baseopt.hpp"
#include "metabbo/environment.hpp"
#include "metabbo/rng.hpp"

namespace metabbo::metaopt {

using environment::Observation;

enum class AgentKind { dqn_de_ms, ddpg_de_f, de_de_fcr };

std::string_view to_string(AgentKind kind) noexcept;

struct DiscreteActions {
  std::size_t count = 0;
  friend bool operator==(const DiscreteActions&, const DiscreteActions&) = default;
};
struct ContinuousActions {
  std::size_t dim = 0;
  double low = 0.0;
  double high = 1.0;
  friend bool operator==(const ContinuousActions&, const ContinuousActions&) = default;
};

struct AgentSpec {
  AgentKind kind = AgentKind::dqn_de_ms;
  std::size_t observation_length = environment::kObservationLength;
  std::variant<DiscreteActions, ContinuousActions> actions;

  /// dqn: discrete(4); ddpg: continuous(1, 0.05, 0.95); de_de_fcr: continuous(2, 0, 1).
  static AgentSpec for_kind(AgentKind kind);
  friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

/// Raw meta-action: a discrete index or a real vector.
using Action = std::variant<std::size_t, std::vector<double>>;

/// Maps a raw action onto DE control. Throws invalid-action when the action
/// has the wrong shape or lies outside the kind's action space.
baseopt::BaseControl decode_action(AgentKind kind, const Action& action);

struct Transition {
  Observation observation{};
  Action action;
  double reward = 0.0;
  Observation next_observation{};
  bool done = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10000);

  void push(Transition t);
  /// Uniform with replacement. Requires size() >= batch.
  std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;
  void clear() noexcept;

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

struct EpisodeOutcome {
  double initial_error = 0.0;
  double final_error = 0.0;
  double episode_return = 0.0;
  std::size_t steps = 0;
};

enum class LearnStatus { updated, not_ready };

class MetaOptimizer {
 public:
  virtual ~MetaOptimizer() = default;

  virtual AgentKind kind() const noexcept = 0;
  AgentSpec spec() const { return AgentSpec::for_kind(kind()); }

  /// Deterministic action used at test time.
  virtual Action get_action(std::span<const double> obs) const = 0;
  /// Training-time action (exploration noise, or the candidate under evaluation).
  virtual Action get_action_with_exploration(std::span<const double> obs, Rng& rng) = 0;

  virtual void observe(const Transition& transition) = 0;
  virtual void end_episode(const EpisodeOutcome& outcome) = 0;
  virtual LearnStatus learn(Rng& rng) = 0;
  /// Clears episodic state (replay, schedule); learned parameters survive.
  virtual void reset() = 0;

  /// Total environment steps the training run will take; drives schedules.
  virtual void set_training_horizon(std::size_t /*total_steps*/) {}

  virtual nlohmann::json to_json() const = 0;
  virtual std::unique_ptr<MetaOptimizer> clone() const = 0;

  baseopt::BaseControl control_for(std::span<const double> obs) const { return decode_action(kind(), get_action(obs)); }

 protected:
  void check_observation(std::span<const double> obs) const;
};

// --- DQN_DE_MS: value-based mutation-strategy selection -------------------

struct DqnConfig {
  std::vector<std::size_t> hidden = {64, 64};
  double gamma = 0.99;
  approximator::AdamConfig adam{};
  std::size_t replay_capacity = 10000;
  std::size_t batch_size = 64;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  /// Fraction of the training horizon over which epsilon decays linearly.
  double epsilon_decay_fraction = 0.5;
  std::size_t target_sync_interval = 200;
};

class DqnAgent final : public MetaOptimizer {
 public:
  DqnAgent(DqnConfig config, std::uint64_t seed);

  AgentKind kind() const noexcept override { return AgentKind::dqn_de_ms; }
  Action get_action(std::span<const double> obs) const override;
  Action get_action_with_exploration(std::span<const double> obs, Rng& rng) override;
  void observe(const Transition& transition) override;
  void end_episode(const EpisodeOutcome&) override {}
  LearnStatus learn(Rng& rng) override;
  void reset() override;
  void set_training_horizon(std::size_t total_steps) override;
  nlohmann::json to_json() const override;
  std::unique_ptr<MetaOptimizer> clone() const override { return std::make_unique<DqnAgent>(*this); }

  static std::unique_ptr<DqnAgent> from_json(const nlohmann::json& j);

  double epsilon() const noexcept;
  Vector q_values(std::span<const double> obs) const { return online_.forward(obs); }
  approximator::DenseNet& online() noexcept { return online_; }
  const approximator::DenseNet& target() const noexcept { return target_; }
  approximator::DenseNet& target_mutable() noexcept { return target_; }
  const ReplayBuffer& replay() const noexcept { return replay_; }
  const DqnConfig& config() const noexcept { return config_; }
  std::size_t learn_calls() const noexcept { return learn_calls_; }

 private:
  DqnConfig config_;
  approximator::DenseNet online_;
  approximator::DenseNet target_;
  approximator::AdamState adam_;
  ReplayBuffer replay_;
  std::size_t decay_steps_ = 250000;
  std::size_t exploration_steps_ = 0;
  std::size_t learn_calls_ = 0;
};

// --- DDPG_DE_F: actor-critic scale-factor control --------------------------

struct DdpgConfig {
  std::vector<std::size_t> hidden = {64, 64};
  double gamma = 0.99;
  double tau = 0.005;
  double sigma = 0.1;
  approximator::AdamConfig actor_adam{1e-4};
  approximator::AdamConfig critic_adam{1e-3};
  std::size_t replay_capacity = 10000;
  std::size_t batch_size = 64;
  double low = 0.05;
  double high = 0.95;
};

class DdpgAgent final : public MetaOptimizer {
 public:
  DdpgAgent(DdpgConfig config, std::uint64_t seed);

  AgentKind kind() const noexcept override { return AgentKind::ddpg_de_f; }
  Action get_action(std::span<const double> obs) const override;
  Action get_action_with_exploration(std::span<const double> obs, Rng& rng) override;
  void observe(const Transition& transition) override;
  void end_episode(const EpisodeOutcome&) override {}
  LearnStatus learn(Rng& rng) override;
  void reset() override;
  nlohmann::json to_json() const override;
  std::unique_ptr<MetaOptimizer> clone() const override { return std::make_unique<DdpgAgent>(*this); }

  static std::unique_ptr<DdpgAgent> from_json(const nlohmann::json& j);

  /// low + (high - low) * sigmoid(u)
  double squash(double pre_activation) const noexcept;

  approximator::DenseNet& actor() noexcept { return actor_; }
  approximator::DenseNet& critic() noexcept { return critic_; }
  const approximator::DenseNet& actor_target() const noexcept { return actor_target_; }
  const approximator::DenseNet& critic_target() const noexcept { return critic_target_; }
  const ReplayBuffer& replay() const noexcept { return replay_; }
  const DdpgConfig& config() const noexcept { return config_; }

 private:
  double critic_value(const approximator::DenseNet& critic, std::span<const double> obs, double action) const;

  DdpgConfig config_;
  approximator::DenseNet actor_;
  approximator::DenseNet critic_;
  approximator::DenseNet actor_target_;
  approximator::DenseNet critic_target_;
  approximator::AdamState actor_adam_;
  approximator::AdamState critic_adam_;
  ReplayBuffer replay_;
  std::size_t learn_calls_ = 0;
};

// --- DE_DE_FCR: meta-level DE over (F, CR) ---------------------------------

struct DeMetaConfig {
  std::size_t population_size = 20;
  /// Episodes (sampled training problems) averaged into one meta-fitness.
  std::size_t episodes_per_candidate = 3;
  double meta_F = 0.5;
  double meta_CR = 0.9;
};

class DeMetaAgent final : public MetaOptimizer {
 public:
  using Candidate = std::array<double, 2>;  // (F, CR)

  DeMetaAgent(DeMetaConfig config, std::uint64_t seed);

  AgentKind kind() const noexcept override { return AgentKind::de_de_fcr; }
  Action get_action(std::span<const double> obs) const override;
  Action get_action_with_exploration(std::span<const double> obs, Rng& rng) override;
  void observe(const Transition&) override {}
  void end_episode(const EpisodeOutcome& outcome) override;
  LearnStatus learn(Rng& rng) override;
  void reset() override;
  nlohmann::json to_json() const override;
  std::unique_ptr<MetaOptimizer> clone() const override { return std::make_unique<DeMetaAgent>(*this); }

  static std::unique_ptr<DeMetaAgent> from_json(const nlohmann::json& j);

  const std::vector<Candidate>& candidates() const noexcept { return candidates_; }
  const std::vector<double>& meta_fitness() const noexcept { return fitness_; }
  Candidate best_candidate() const { return candidates_[best_]; }
  double best_meta_fitness() const { return fitness_[best_]; }
  std::size_t meta_generation() const noexcept { return generation_; }
  /// Best meta-fitness recorded at the end of every completed meta-generation.
  const std::vector<double>& best_history() const noexcept { return best_history_; }
  const DeMetaConfig& config() const noexcept { return config_; }

  /// Feeds a meta-fitness for the candidate currently under evaluation
  /// directly, bypassing episode outcomes.
  void record_fitness(double fitness, Rng& rng);

 private:
  const Candidate& under_evaluation() const;
  void advance(Rng& rng);
  void make_trials(Rng& rng);
  void refresh_best();

  DeMetaConfig config_;
  std::vector<Candidate> candidates_;
  std::vector<double> fitness_;
  std::vector<Candidate> trials_;
  std::vector<double> trial_fitness_;
  bool evaluating_trials_ = false;
  std::size_t current_ = 0;
  std::size_t best_ = 0;
  std::size_t generation_ = 0;
  std::vector<double> pending_;
  std::vector<double> best_history_;
};

// --- registry ---------------------------------------------------------------

struct AgentOptions {
  std::uint64_t seed = 0;
  DqnConfig dqn{};
  DdpgConfig ddpg{};
  DeMetaConfig de_meta{};
};

/// Component names follow METAOPT_BASEOPT_LEARNEDOBJ, e.g. "DQN_DE_MS".
AgentKind parse_components(const std::string& name);
std::string components_name(AgentKind kind);
std::vector<std::string> registered_components();

std::unique_ptr<MetaOptimizer> make_agent(AgentKind kind, const AgentOptions& options);
std::unique_ptr<MetaOptimizer> agent_from_json(AgentKind kind, const nlohmann::json& j);

// JSON helpers shared by the agents.
nlohmann::json net_to_json(const approximator::DenseNet& net);
approximator::DenseNet net_from_json(const nlohmann::json& j);
nlohmann::json adam_to_json(const approximator::AdamState& state);
approximator::AdamState adam_from_json(const nlohmann::json& j);

}  // namespace metabbo::metaopt
