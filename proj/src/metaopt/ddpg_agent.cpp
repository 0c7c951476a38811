#include <algorithm>
#include <cmath>

#include "metabbo/error.hpp"
#include "metabbo/metaopt.hpp"

namespace metabbo::metaopt {

namespace {

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

void soft_update(approximator::DenseNet& target, const approximator::DenseNet& online, double tau) {
  auto t = target.parameters();
  const auto o = online.parameters();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = (1.0 - tau) * t[i] + tau * o[i];
}

Vector critic_input(std::span<const double> obs, double action) {
  Vector in(obs.begin(), obs.end());
  in.push_back(action);
  return in;
}

}  // namespace

DdpgAgent::DdpgAgent(DdpgConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      actor_(approximator::make_mlp(environment::kObservationLength, config_.hidden, 1,
                                    approximator::Activation::identity)),
      critic_(approximator::make_mlp(environment::kObservationLength + 1, config_.hidden, 1,
                                     approximator::Activation::identity)),
      replay_(config_.replay_capacity) {
  Rng rng(seed);
  actor_.initialize(rng);
  critic_.initialize(rng);
  actor_target_ = actor_;
  critic_target_ = critic_;
  actor_adam_ = approximator::AdamState(actor_.num_parameters(), config_.actor_adam);
  critic_adam_ = approximator::AdamState(critic_.num_parameters(), config_.critic_adam);
}

double DdpgAgent::squash(double pre_activation) const noexcept {
  return config_.low + (config_.high - config_.low) * sigmoid(pre_activation);
}

double DdpgAgent::critic_value(const approximator::DenseNet& critic, std::span<const double> obs,
                               double action) const {
  return critic.forward(critic_input(obs, action))[0];
}

Action DdpgAgent::get_action(std::span<const double> obs) const {
  check_observation(obs);
  return std::vector<double>{squash(actor_.forward(obs)[0])};
}

Action DdpgAgent::get_action_with_exploration(std::span<const double> obs, Rng& rng) {
  check_observation(obs);
  double f = squash(actor_.forward(obs)[0]);
  if (config_.sigma > 0.0) f += rng.normal(0.0, config_.sigma);
  return std::vector<double>{std::clamp(f, config_.low, config_.high)};
}

void DdpgAgent::observe(const Transition& transition) { replay_.push(transition); }

LearnStatus DdpgAgent::learn(Rng& rng) {
  if (replay_.size() < config_.batch_size) return LearnStatus::not_ready;
  const auto batch = replay_.sample(config_.batch_size, rng);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  // Critic: minimise mean squared TD error against the target networks.
  Vector critic_grad(critic_.num_parameters(), 0.0);
  for (const Transition* t : batch) {
    double y = t->reward;
    if (!t->done) {
      const double next_action = squash(actor_target_.forward(t->next_observation)[0]);
      y += config_.gamma * critic_value(critic_target_, t->next_observation, next_action);
    }
    const double a = std::get<std::vector<double>>(t->action)[0];
    const Vector in = critic_input(t->observation, a);
    const double q = critic_.forward(in)[0];
    const double g = 2.0 * (q - y) * inv_batch;
    critic_.backward_accumulate(in, std::span<const double>(&g, 1), critic_grad);
  }
  approximator::adam_step(critic_.parameters(), critic_grad, critic_adam_);

  // Actor: ascend Q(s, mu(s)) through the updated critic.
  Vector actor_grad(actor_.num_parameters(), 0.0);
  Vector scratch(critic_.num_parameters(), 0.0);
  const double one = 1.0;
  for (const Transition* t : batch) {
    const double u = actor_.forward(t->observation)[0];
    const double s = sigmoid(u);
    const double action = squash(u);
    const Vector in = critic_input(t->observation, action);
    const Vector dq_din = critic_.backward_accumulate(in, std::span<const double>(&one, 1), scratch);
    const double dq_da = dq_din.back();
    const double g = -dq_da * (config_.high - config_.low) * s * (1.0 - s) * inv_batch;
    actor_.backward_accumulate(t->observation, std::span<const double>(&g, 1), actor_grad);
  }
  approximator::adam_step(actor_.parameters(), actor_grad, actor_adam_);

  soft_update(critic_target_, critic_, config_.tau);
  soft_update(actor_target_, actor_, config_.tau);
  ++learn_calls_;
  return LearnStatus::updated;
}

void DdpgAgent::reset() { replay_.clear(); }

nlohmann::json DdpgAgent::to_json() const {
  const auto& c = config_;
  return {
      {"config",
       {{"hidden", c.hidden},
        {"gamma", c.gamma},
        {"tau", c.tau},
        {"sigma", c.sigma},
        {"actor_lr", c.actor_adam.lr},
        {"critic_lr", c.critic_adam.lr},
        {"replay_capacity", c.replay_capacity},
        {"batch_size", c.batch_size},
        {"low", c.low},
        {"high", c.high}}},
      {"actor", net_to_json(actor_)},
      {"critic", net_to_json(critic_)},
      {"actor_target", net_to_json(actor_target_)},
      {"critic_target", net_to_json(critic_target_)},
      {"actor_adam", adam_to_json(actor_adam_)},
      {"critic_adam", adam_to_json(critic_adam_)},
      {"schedule", {{"learn_calls", learn_calls_}}},
  };
}

std::unique_ptr<DdpgAgent> DdpgAgent::from_json(const nlohmann::json& j) {
  const auto& jc = j.at("config");
  DdpgConfig c;
  c.hidden = jc.at("hidden").get<std::vector<std::size_t>>();
  c.gamma = jc.at("gamma").get<double>();
  c.tau = jc.at("tau").get<double>();
  c.sigma = jc.at("sigma").get<double>();
  c.actor_adam.lr = jc.at("actor_lr").get<double>();
  c.critic_adam.lr = jc.at("critic_lr").get<double>();
  c.replay_capacity = jc.at("replay_capacity").get<std::size_t>();
  c.batch_size = jc.at("batch_size").get<std::size_t>();
  c.low = jc.at("low").get<double>();
  c.high = jc.at("high").get<double>();
  auto agent = std::make_unique<DdpgAgent>(c, 0);
  agent->actor_ = net_from_json(j.at("actor"));
  agent->critic_ = net_from_json(j.at("critic"));
  agent->actor_target_ = net_from_json(j.at("actor_target"));
  agent->critic_target_ = net_from_json(j.at("critic_target"));
  agent->actor_adam_ = adam_from_json(j.at("actor_adam"));
  agent->critic_adam_ = adam_from_json(j.at("critic_adam"));
  agent->learn_calls_ = j.at("schedule").at("learn_calls").get<std::size_t>();
  if (agent->actor_.input_size() != environment::kObservationLength || agent->actor_.output_size() != 1 ||
      agent->critic_.input_size() != environment::kObservationLength + 1 || agent->critic_.output_size() != 1) {
    throw Error(Errc::parse, "DDPG network shapes do not match the action space");
  }
  return agent;
}

}  // namespace metabbo::metaopt
