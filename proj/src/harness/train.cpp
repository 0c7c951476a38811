#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "metabbo/error.hpp"
#include "metabbo/harness.hpp"

namespace metabbo::harness {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string config_hash(const std::string& components, const problems::ProblemSplit& split, const TrainOptions& o) {
  std::ostringstream ss;
  ss.precision(17);
  ss << components << '|' << o.max_episodes << '|' << o.max_steps_per_episode << '|' << o.stop_window << '|'
     << o.stop_threshold << '|' << o.master_seed << '|' << o.pop_size << '|' << o.epoch_length << "|seen";
  for (int f : split.seen) ss << ',' << f;
  ss << "|dims";
  for (int d : o.dims) ss << ',' << d;
  ss << "|inst";
  for (auto i : o.train_instances) ss << ',' << i;
  return hex64(stream_seed(0, ss.str()));
}

}  // namespace

void TrainOptions::validate() const {
  if (stop_window < 1) throw Error(Errc::configuration, "stop_window must be at least 1");
  if (!std::isfinite(stop_threshold)) throw Error(Errc::configuration, "stop_threshold must be finite");
  if (max_steps_per_episode < 1) throw Error(Errc::configuration, "max_steps_per_episode must be at least 1");
  if (pop_size < 4) throw Error(Errc::population_too_small, "population size must be at least 4");
  if (dims.empty()) throw Error(Errc::configuration, "at least one training dimension is required");
  for (int d : dims) {
    if (d < 2) throw Error(Errc::invalid_dimension, "dimension must be at least 2");
  }
  if (train_instances.empty()) throw Error(Errc::configuration, "at least one training instance is required");
}

bool should_stop(const std::vector<double>& returns, std::size_t window, double threshold) {
  if (window == 0 || returns.size() < window) return false;
  double acc = 0.0;
  for (std::size_t i = returns.size() - window; i < returns.size(); ++i) acc += returns[i];
  return acc / static_cast<double>(window) >= threshold;
}

std::string TrainingLog::to_csv() const {
  std::ostringstream ss;
  ss.precision(17);
  ss << "episode,function,dim,instance,steps,return,initial_error,final_error\n";
  for (const auto& e : episodes) {
    ss << e.episode << ',' << e.function_id << ',' << e.dim << ',' << e.instance_seed << ',' << e.steps << ','
       << e.episode_return << ',' << e.initial_error << ',' << e.final_error << '\n';
  }
  ss << "\nepoch,first_episode,episodes,avg_perf,best_perf,worst_perf\n";
  for (const auto& e : epochs) {
    ss << e.epoch << ',' << e.first_episode << ',' << e.episodes << ',' << e.perf.avg << ',' << e.perf.best << ','
       << e.perf.worst << '\n';
  }
  ss << "\nstopped_by_threshold," << (stopped_by_threshold ? 1 : 0) << '\n';
  ss << "\nfunction,evaluations\n";
  for (const auto& [fid, n] : evaluation_audit) ss << fid << ',' << n << '\n';
  return ss.str();
}

TrainResult train(const std::string& components, const problems::ProblemSplit& split, const TrainOptions& opts) {
  const metaopt::AgentKind kind = metaopt::parse_components(components);
  opts.validate();
  metaopt::AgentOptions agent_opts;
  agent_opts.seed = stream_seed(opts.master_seed, "agent");
  agent_opts.dqn = opts.dqn;
  agent_opts.ddpg = opts.ddpg;
  agent_opts.de_meta = opts.de_meta;
  return train_agent(metaopt::make_agent(kind, agent_opts), components, split, opts);
}

TrainResult train_agent(std::unique_ptr<metaopt::MetaOptimizer> agent, const std::string& components,
                        const problems::ProblemSplit& split, const TrainOptions& opts) {
  opts.validate();
  if (metaopt::parse_components(components) != agent->kind()) {
    throw Error(Errc::registry, "agent kind does not match components " + components);
  }
  if (split.seen.empty()) throw Error(Errc::configuration, "training split has no seen functions");

  environment::EnvConfig cfg;
  cfg.split = split;
  cfg.split.dims = opts.dims;
  cfg.pop_size = opts.pop_size;
  cfg.max_steps_per_episode = opts.max_steps_per_episode;
  cfg.mode = environment::Mode::train;
  cfg.train_instances = opts.train_instances;
  environment::Environment env(cfg);

  agent->set_training_horizon(opts.max_episodes * opts.max_steps_per_episode);
  agent->reset();
  Rng rng(stream_seed(opts.master_seed, "episodes"));

  TrainResult result;
  std::vector<double> returns;
  for (std::size_t episode = 0; episode < opts.max_episodes; ++episode) {
    environment::Observation obs = env.reset(rng);
    double episode_return = 0.0;
    while (!env.done()) {
      metaopt::Transition t;
      t.observation = obs;
      t.action = agent->get_action_with_exploration(obs, rng);
      const environment::StepResult step = env.step(metaopt::decode_action(agent->kind(), t.action));
      t.reward = step.reward;
      t.next_observation = step.observation;
      t.done = step.done;
      agent->observe(t);
      agent->learn(rng);
      episode_return += step.reward;
      obs = step.observation;
    }
    metaopt::EpisodeOutcome outcome{env.initial_best_error(), env.best_error(), episode_return, env.step_index()};
    agent->end_episode(outcome);
    agent->learn(rng);

    const auto& p = env.problem();
    result.log.episodes.push_back({episode, p.function_id(), static_cast<int>(p.dim()), p.instance_seed(),
                                   env.step_index(), episode_return, outcome.initial_error, outcome.final_error});
    returns.push_back(episode_return);
    if (should_stop(returns, opts.stop_window, opts.stop_threshold)) {
      result.log.stopped_by_threshold = true;
      break;
    }
  }

  for (const auto& [fid, count] : env.evaluation_audit()) {
    if (!split.is_seen(fid)) {
      throw Error(Errc::numeric, "training evaluated unseen function F" + std::to_string(fid));
    }
  }
  result.log.evaluation_audit = env.evaluation_audit();

  const std::size_t epoch_len = opts.epoch_length > 0 ? opts.epoch_length : split.seen.size() * opts.dims.size();
  const auto& eps = result.log.episodes;
  for (std::size_t first = 0, epoch = 0; first < eps.size(); first += epoch_len, ++epoch) {
    const std::size_t last = std::min(eps.size(), first + epoch_len);
    std::vector<double> perfs;
    for (std::size_t i = first; i < last; ++i) perfs.push_back(-eps[i].final_error);
    result.log.epochs.push_back({epoch, first, last - first, metrics::aggregate_meta(perfs)});
  }

  AgentModel& model = result.model;
  model.components = components;
  model.spec = agent->spec();
  model.config_hash = config_hash(components, split, opts);
  model.episodes = eps.size();
  model.train_dims = opts.dims;
  model.seen = split.seen;
  model.agent = std::shared_ptr<const metaopt::MetaOptimizer>(std::move(agent));
  return result;
}

}  // namespace metabbo::harness
