#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "metabbo/error.hpp"
#include "metabbo/metaopt.hpp"

namespace metabbo::metaopt {

namespace {

constexpr double kUnevaluated = -std::numeric_limits<double>::infinity();

nlohmann::json fitness_to_json(const std::vector<double>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (double f : v) out.push_back(std::isfinite(f) ? nlohmann::json(f) : nlohmann::json(nullptr));
  return out;
}

std::vector<double> fitness_from_json(const nlohmann::json& j) {
  std::vector<double> out;
  for (const auto& e : j) out.push_back(e.is_null() ? kUnevaluated : e.get<double>());
  return out;
}

}  // namespace

DeMetaAgent::DeMetaAgent(DeMetaConfig config, std::uint64_t seed) : config_(config) {
  if (config_.population_size < 4) {
    throw Error(Errc::population_too_small, "meta-population needs at least 4 candidates for rand/1");
  }
  if (config_.episodes_per_candidate == 0) {
    throw Error(Errc::configuration, "episodes_per_candidate must be positive");
  }
  Rng rng(seed);
  candidates_.resize(config_.population_size);
  // Slot 0 holds the default control so the search starts from it.
  candidates_[0] = {baseopt::kDefaultControl.F, baseopt::kDefaultControl.CR};
  for (std::size_t i = 1; i < candidates_.size(); ++i) candidates_[i] = {rng.uniform(), rng.uniform()};
  fitness_.assign(candidates_.size(), kUnevaluated);
}

Action DeMetaAgent::get_action(std::span<const double> obs) const {
  check_observation(obs);
  const Candidate c = best_candidate();
  return std::vector<double>{c[0], c[1]};
}

const DeMetaAgent::Candidate& DeMetaAgent::under_evaluation() const {
  return evaluating_trials_ ? trials_[current_] : candidates_[current_];
}

Action DeMetaAgent::get_action_with_exploration(std::span<const double> obs, Rng& /*rng*/) {
  check_observation(obs);
  const Candidate& c = under_evaluation();
  return std::vector<double>{c[0], c[1]};
}

void DeMetaAgent::end_episode(const EpisodeOutcome& outcome) {
  pending_.push_back(outcome.initial_error > 0.0 ? outcome.final_error / outcome.initial_error : 0.0);
}

LearnStatus DeMetaAgent::learn(Rng& rng) {
  if (pending_.size() < config_.episodes_per_candidate) return LearnStatus::not_ready;
  const double mean = std::accumulate(pending_.begin(), pending_.end(), 0.0) / static_cast<double>(pending_.size());
  pending_.clear();
  record_fitness(-mean, rng);
  return LearnStatus::updated;
}

void DeMetaAgent::record_fitness(double fitness, Rng& rng) {
  if (!std::isfinite(fitness)) throw Error(Errc::numeric, "meta-fitness must be finite");
  if (evaluating_trials_) {
    trial_fitness_[current_] = fitness;
  } else {
    fitness_[current_] = fitness;
    refresh_best();
  }
  advance(rng);
}

void DeMetaAgent::advance(Rng& rng) {
  ++current_;
  if (current_ < candidates_.size()) return;
  current_ = 0;
  if (evaluating_trials_) {
    // Greedy one-to-one replacement; a trial must be strictly better.
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      if (trial_fitness_[i] > fitness_[i]) {
        candidates_[i] = trials_[i];
        fitness_[i] = trial_fitness_[i];
      }
    }
    refresh_best();
    ++generation_;
  }
  evaluating_trials_ = true;
  best_history_.push_back(fitness_[best_]);
  make_trials(rng);
}

void DeMetaAgent::refresh_best() {
  for (std::size_t i = 0; i < fitness_.size(); ++i) {
    if (fitness_[i] > fitness_[best_]) best_ = i;
  }
}

void DeMetaAgent::make_trials(Rng& rng) {
  const std::size_t n = candidates_.size();
  Matrix pop(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    pop(i, 0) = candidates_[i][0];
    pop(i, 1) = candidates_[i][1];
  }
  trials_.assign(n, Candidate{});
  trial_fitness_.assign(n, kUnevaluated);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<std::size_t, 3> r{};
    for (std::size_t m = 0; m < r.size(); ++m) {
      std::size_t pick = 0;
      do {
        pick = rng.index(n);
      } while (pick == i || std::find(r.begin(), r.begin() + m, pick) != r.begin() + m);
      r[m] = pick;
    }
    Vector donor = baseopt::mutate_with_indices(pop, 0, baseopt::Strategy::rand_1, config_.meta_F, i, r);
    baseopt::clamp_to_box(donor, 0.0, 1.0);
    const Vector trial = baseopt::crossover_bin(pop.row(i), donor, config_.meta_CR, rng);
    trials_[i] = {trial[0], trial[1]};
  }
}

void DeMetaAgent::reset() { pending_.clear(); }

nlohmann::json DeMetaAgent::to_json() const {
  auto pairs = [](const std::vector<Candidate>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : v) out.push_back({c[0], c[1]});
    return out;
  };
  return {
      {"config",
       {{"population_size", config_.population_size},
        {"episodes_per_candidate", config_.episodes_per_candidate},
        {"meta_F", config_.meta_F},
        {"meta_CR", config_.meta_CR}}},
      {"candidates", pairs(candidates_)},
      {"meta_fitness", fitness_to_json(fitness_)},
      {"trials", pairs(trials_)},
      {"trial_fitness", fitness_to_json(trial_fitness_)},
      {"evaluating_trials", evaluating_trials_},
      {"current", current_},
      {"best", best_},
      {"meta_generation", generation_},
      {"best_history", best_history_},
  };
}

std::unique_ptr<DeMetaAgent> DeMetaAgent::from_json(const nlohmann::json& j) {
  const auto& jc = j.at("config");
  DeMetaConfig c;
  c.population_size = jc.at("population_size").get<std::size_t>();
  c.episodes_per_candidate = jc.at("episodes_per_candidate").get<std::size_t>();
  c.meta_F = jc.at("meta_F").get<double>();
  c.meta_CR = jc.at("meta_CR").get<double>();
  auto agent = std::make_unique<DeMetaAgent>(c, 0);
  auto pairs = [](const nlohmann::json& arr) {
    std::vector<Candidate> out;
    for (const auto& p : arr) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return out;
  };
  agent->candidates_ = pairs(j.at("candidates"));
  agent->fitness_ = fitness_from_json(j.at("meta_fitness"));
  agent->trials_ = pairs(j.at("trials"));
  agent->trial_fitness_ = fitness_from_json(j.at("trial_fitness"));
  agent->evaluating_trials_ = j.at("evaluating_trials").get<bool>();
  agent->current_ = j.at("current").get<std::size_t>();
  agent->best_ = j.at("best").get<std::size_t>();
  agent->generation_ = j.at("meta_generation").get<std::size_t>();
  agent->best_history_ = j.at("best_history").get<std::vector<double>>();
  const std::size_t n = agent->candidates_.size();
  if (n != c.population_size || agent->fitness_.size() != n || agent->best_ >= n || agent->current_ >= n ||
      (agent->evaluating_trials_ && (agent->trials_.size() != n || agent->trial_fitness_.size() != n))) {
    throw Error(Errc::parse, "inconsistent meta-population record");
  }
  return agent;
}

}  // namespace metabbo::metaopt
