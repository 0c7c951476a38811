#include "metabbo/environment.hpp"

#include <algorithm>
#include <cmath>

#include "metabbo/error.hpp"

namespace metabbo::environment {

namespace {

constexpr double kImprovementEpsilon = 1e-12;

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

double median(Vector v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

}  // namespace

double compute_reward(double prev_best, double new_best) {
  return clip01((prev_best - new_best) / (std::fabs(prev_best) + kImprovementEpsilon));
}

Observation featurize(const baseopt::BaseOptimizerState& state, const problems::ProblemInstance& problem,
                      const FeatureContext& context) {
  Observation obs{};
  const double max_steps = static_cast<double>(std::max<std::size_t>(context.max_steps, 1));
  obs[kBudgetUsed] = clip01(static_cast<double>(context.step_index) / max_steps);

  double error = 0.0;
  if (context.error_proxy == ErrorProxy::known_optimum) {
    error = state.best_f - problem.f_opt();
  } else {
    error = median(state.fitness) - state.best_f;
  }
  const double log_error = std::log10(1.0 + std::max(0.0, error));
  obs[kLogError] = log_error / (1.0 + log_error);

  obs[kLastImprovement] = clip01(context.last_improvement);

  const std::size_t n = state.fitness.size();
  double mean = 0.0;
  for (double f : state.fitness) mean += f;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double f : state.fitness) var += (f - mean) * (f - mean);
  const double stddev = std::sqrt(var / static_cast<double>(n));
  // Coefficient of variation c mapped through c / (1 + c) to stay in [0, 1].
  obs[kFitnessSpread] = stddev > 0.0 ? stddev / (stddev + std::fabs(mean)) : 0.0;

  const std::size_t dim = problem.dim();
  double dist_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = state.population.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = state.population.row(j);
      double sq = 0.0;
      for (std::size_t k = 0; k < dim; ++k) sq += (a[k] - b[k]) * (a[k] - b[k]);
      dist_sum += std::sqrt(sq);
    }
  }
  const double pairs = static_cast<double>(n * (n - 1) / 2);
  const double diagonal = std::sqrt(static_cast<double>(dim)) * (problem.upper_bound() - problem.lower_bound());
  obs[kDiversity] = pairs > 0.0 ? clip01(dist_sum / pairs / diagonal) : 0.0;

  obs[kStagnation] = clip01(static_cast<double>(context.stagnation) / max_steps);
  obs[kDimension] = static_cast<double>(dim) / 50.0;
  obs[kProgress] = clip01(static_cast<double>(state.generation) / max_steps);
  return obs;
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
  if (config_.max_steps_per_episode < 1) {
    throw Error(Errc::configuration, "max_steps_per_episode must be at least 1");
  }
}

const problems::ProblemInstance& Environment::problem() const {
  if (!problem_) throw Error(Errc::configuration, "environment has not been reset");
  return *problem_;
}

const problems::ProblemInstance& Environment::sample_problem(Rng& rng) {
  const auto& split = config_.split;
  if (split.seen.empty() || split.dims.empty() || config_.train_instances.empty()) {
    throw Error(Errc::configuration, "training problem pool is empty");
  }
  const int fid = split.seen[rng.index(split.seen.size())];
  const int dim = split.dims[rng.index(split.dims.size())];
  const std::uint64_t inst = config_.train_instances[rng.index(config_.train_instances.size())];
  const auto key = std::make_tuple(fid, dim, inst);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, problems::make_bbob(fid, dim, inst)).first;
  return it->second;
}

Observation Environment::reset(Rng& rng) {
  if (config_.mode == Mode::train) {
    problem_ = sample_problem(rng);
  } else {
    if (!config_.designated) throw Error(Errc::configuration, "test mode needs a designated problem");
    problem_ = *config_.designated;
  }
  rng_ = Rng(rng.next_u64());
  state_ = baseopt::init(*problem_, config_.pop_size, rng_);
  audit_[problem_->function_id()] += state_.evals_used;
  step_index_ = 0;
  stagnation_ = 0;
  last_improvement_ = 0.0;
  started_ = true;
  done_ = false;
  initial_error_ = best_error();
  trace_.assign(1, initial_error_);
  observation_ = observe();
  return observation_;
}

StepResult Environment::step(const baseopt::BaseControl& control) {
  if (!started_) throw Error(Errc::episode_finished, "step before reset");
  if (done_) throw Error(Errc::episode_finished, "episode already finished");
  const double prev_best = state_.best_f;
  StepResult result;
  result.performance = baseopt::update(state_, *problem_, control, rng_);
  audit_[problem_->function_id()] += config_.pop_size;
  result.reward = compute_reward(prev_best, state_.best_f);
  last_improvement_ = result.reward;
  if (result.performance.improvement < kImprovementEpsilon) {
    ++stagnation_;
  } else {
    stagnation_ = 0;
  }
  ++step_index_;
  trace_.push_back(best_error());
  done_ = step_index_ >= config_.max_steps_per_episode || best_error() <= config_.solve_tolerance;
  observation_ = observe();
  result.observation = observation_;
  result.done = done_;
  return result;
}

double Environment::best_error() const { return std::max(0.0, state_.best_f - problem().f_opt()); }

Observation Environment::observe() const {
  FeatureContext ctx;
  ctx.step_index = step_index_;
  ctx.max_steps = config_.max_steps_per_episode;
  ctx.stagnation = stagnation_;
  ctx.last_improvement = last_improvement_;
  ctx.error_proxy = config_.error_proxy;
  return featurize(state_, *problem_, ctx);
}

}  // namespace metabbo::environment
