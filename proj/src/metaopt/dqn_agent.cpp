#include <algorithm>
#include <cmath>

#include "metabbo/error.hpp"
#include "metabbo/metaopt.hpp"

namespace metabbo::metaopt {

namespace {

std::size_t argmax_lowest(std::span<const double> q) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i] > q[best]) best = i;
  }
  return best;
}

}  // namespace

DqnAgent::DqnAgent(DqnConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      online_(approximator::make_mlp(environment::kObservationLength, config_.hidden, baseopt::kStrategies.size(),
                                     approximator::Activation::identity)),
      replay_(config_.replay_capacity) {
  Rng rng(seed);
  online_.initialize(rng);
  target_ = online_;
  adam_ = approximator::AdamState(online_.num_parameters(), config_.adam);
}

double DqnAgent::epsilon() const noexcept {
  if (decay_steps_ == 0 || exploration_steps_ >= decay_steps_) return config_.epsilon_end;
  const double frac = static_cast<double>(exploration_steps_) / static_cast<double>(decay_steps_);
  return config_.epsilon_start + frac * (config_.epsilon_end - config_.epsilon_start);
}

void DqnAgent::set_training_horizon(std::size_t total_steps) {
  decay_steps_ = static_cast<std::size_t>(config_.epsilon_decay_fraction * static_cast<double>(total_steps));
}

Action DqnAgent::get_action(std::span<const double> obs) const {
  check_observation(obs);
  return argmax_lowest(online_.forward(obs));
}

Action DqnAgent::get_action_with_exploration(std::span<const double> obs, Rng& rng) {
  check_observation(obs);
  const double eps = epsilon();
  ++exploration_steps_;
  if (rng.uniform() < eps) return rng.index(baseopt::kStrategies.size());
  return argmax_lowest(online_.forward(obs));
}

void DqnAgent::observe(const Transition& transition) { replay_.push(transition); }

LearnStatus DqnAgent::learn(Rng& rng) {
  if (replay_.size() < config_.batch_size) return LearnStatus::not_ready;
  const auto batch = replay_.sample(config_.batch_size, rng);
  const double scale = 2.0 / static_cast<double>(batch.size());
  Vector grad(online_.num_parameters(), 0.0);
  Vector out_grad(baseopt::kStrategies.size(), 0.0);
  for (const Transition* t : batch) {
    double target = t->reward;
    if (!t->done) {
      const Vector next_q = target_.forward(t->next_observation);
      target += config_.gamma * *std::max_element(next_q.begin(), next_q.end());
    }
    const std::size_t a = std::get<std::size_t>(t->action);
    const Vector q = online_.forward(t->observation);
    std::fill(out_grad.begin(), out_grad.end(), 0.0);
    out_grad[a] = scale * (q[a] - target);
    online_.backward_accumulate(t->observation, out_grad, grad);
  }
  approximator::adam_step(online_.parameters(), grad, adam_);
  ++learn_calls_;
  if (config_.target_sync_interval > 0 && learn_calls_ % config_.target_sync_interval == 0) target_ = online_;
  return LearnStatus::updated;
}

void DqnAgent::reset() {
  replay_.clear();
  exploration_steps_ = 0;
}

nlohmann::json DqnAgent::to_json() const {
  const auto& c = config_;
  return {
      {"config",
       {{"hidden", c.hidden},
        {"gamma", c.gamma},
        {"lr", c.adam.lr},
        {"beta1", c.adam.beta1},
        {"beta2", c.adam.beta2},
        {"epsilon", c.adam.epsilon},
        {"replay_capacity", c.replay_capacity},
        {"batch_size", c.batch_size},
        {"epsilon_start", c.epsilon_start},
        {"epsilon_end", c.epsilon_end},
        {"epsilon_decay_fraction", c.epsilon_decay_fraction},
        {"target_sync_interval", c.target_sync_interval}}},
      {"online", net_to_json(online_)},
      {"target", net_to_json(target_)},
      {"adam", adam_to_json(adam_)},
      {"schedule",
       {{"decay_steps", decay_steps_}, {"exploration_steps", exploration_steps_}, {"learn_calls", learn_calls_}}},
  };
}

std::unique_ptr<DqnAgent> DqnAgent::from_json(const nlohmann::json& j) {
  const auto& jc = j.at("config");
  DqnConfig c;
  c.hidden = jc.at("hidden").get<std::vector<std::size_t>>();
  c.gamma = jc.at("gamma").get<double>();
  c.adam = {jc.at("lr").get<double>(), jc.at("beta1").get<double>(), jc.at("beta2").get<double>(),
            jc.at("epsilon").get<double>()};
  c.replay_capacity = jc.at("replay_capacity").get<std::size_t>();
  c.batch_size = jc.at("batch_size").get<std::size_t>();
  c.epsilon_start = jc.at("epsilon_start").get<double>();
  c.epsilon_end = jc.at("epsilon_end").get<double>();
  c.epsilon_decay_fraction = jc.at("epsilon_decay_fraction").get<double>();
  c.target_sync_interval = jc.at("target_sync_interval").get<std::size_t>();
  auto agent = std::make_unique<DqnAgent>(c, 0);
  agent->online_ = net_from_json(j.at("online"));
  agent->target_ = net_from_json(j.at("target"));
  agent->adam_ = adam_from_json(j.at("adam"));
  const auto& js = j.at("schedule");
  agent->decay_steps_ = js.at("decay_steps").get<std::size_t>();
  agent->exploration_steps_ = js.at("exploration_steps").get<std::size_t>();
  agent->learn_calls_ = js.at("learn_calls").get<std::size_t>();
  if (agent->online_.input_size() != environment::kObservationLength ||
      agent->online_.output_size() != baseopt::kStrategies.size() ||
      agent->target_.num_parameters() != agent->online_.num_parameters() ||
      agent->adam_.first_moment.size() != agent->online_.num_parameters()) {
    throw Error(Errc::parse, "DQN network shape does not match its action space");
  }
  return agent;
}

}  // namespace metabbo::metaopt
