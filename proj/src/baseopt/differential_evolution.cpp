#include <algorithm>
#include <cmath>
#include <string>

#include "metabbo/baseopt.hpp"
#include "metabbo/error.hpp"

namespace metabbo::baseopt {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::rand_1: return "rand/1";
    case Strategy::best_1: return "best/1";
    case Strategy::current_to_best_1: return "current-to-best/1";
    case Strategy::rand_2: return "rand/2";
  }
  return "unknown";
}

std::size_t required_donors(Strategy s) noexcept {
  switch (s) {
    case Strategy::rand_1: return 3;
    case Strategy::best_1: return 2;
    case Strategy::current_to_best_1: return 2;
    case Strategy::rand_2: return 5;
  }
  return 0;
}

void BaseControl::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!ok(F) || !ok(CR)) {
    throw Error(Errc::invalid_control, "F and CR must be finite and within [0, 1] (F=" + std::to_string(F) +
                                           ", CR=" + std::to_string(CR) + ")");
  }
}

std::size_t BaseOptimizerState::best_index() const {
  return static_cast<std::size_t>(std::min_element(fitness.begin(), fitness.end()) - fitness.begin());
}

BaseOptimizerState init(const problems::ProblemInstance& problem, std::size_t pop_size, Rng& rng) {
  BaseOptimizerState state;
  state.population = problems::initialize_population(problem, pop_size, rng);
  state.fitness.resize(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) state.fitness[i] = problem.evaluate(state.population.row(i));
  const std::size_t best = state.best_index();
  const auto row = state.population.row(best);
  state.best_x.assign(row.begin(), row.end());
  state.best_f = state.fitness[best];
  state.evals_used = pop_size;
  return state;
}

Vector mutate_with_indices(const Matrix& population, std::size_t best_index, Strategy strategy, double F,
                           std::size_t target_index, std::span<const std::size_t> donors) {
  if (donors.size() < required_donors(strategy)) {
    throw Error(Errc::strategy_arity, std::string(to_string(strategy)) + " needs " +
                                          std::to_string(required_donors(strategy)) + " donor indices");
  }
  const std::size_t n = population.cols();
  Vector v(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto x = [&](std::size_t idx) { return population(idx, j); };
    switch (strategy) {
      case Strategy::rand_1:
        v[j] = x(donors[0]) + F * (x(donors[1]) - x(donors[2]));
        break;
      case Strategy::best_1:
        v[j] = x(best_index) + F * (x(donors[0]) - x(donors[1]));
        break;
      case Strategy::current_to_best_1:
        v[j] = x(target_index) + F * (x(best_index) - x(target_index)) + F * (x(donors[0]) - x(donors[1]));
        break;
      case Strategy::rand_2:
        v[j] = x(donors[0]) + F * (x(donors[1]) - x(donors[2])) + F * (x(donors[3]) - x(donors[4]));
        break;
    }
  }
  return v;
}

Vector mutate(const BaseOptimizerState& state, Strategy strategy, double F, std::size_t target_index, Rng& rng) {
  const std::size_t k = required_donors(strategy);
  const std::size_t n = state.size();
  if (n < k + 1) {
    throw Error(Errc::strategy_arity, std::string(to_string(strategy)) + " needs a population of at least " +
                                          std::to_string(k + 1) + ", got " + std::to_string(n));
  }
  std::array<std::size_t, 5> picked{};
  for (std::size_t m = 0; m < k; ++m) {
    std::size_t r = 0;
    do {
      r = rng.index(n);
    } while (r == target_index || std::find(picked.begin(), picked.begin() + m, r) != picked.begin() + m);
    picked[m] = r;
  }
  return mutate_with_indices(state.population, state.best_index(), strategy, F, target_index,
                             std::span<const std::size_t>(picked.data(), k));
}

Vector crossover_bin(std::span<const double> target, std::span<const double> donor, double CR, Rng& rng) {
  if (target.size() != donor.size()) {
    throw Error(Errc::dimension_mismatch, "crossover operands differ in length");
  }
  const std::size_t n = target.size();
  const std::size_t j_rand = rng.index(n);
  Vector trial(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = rng.uniform();
    trial[j] = (u < CR || j == j_rand) ? donor[j] : target[j];
  }
  return trial;
}

void clamp_to_box(std::span<double> x, double lower, double upper) {
  for (double& v : x) v = std::clamp(v, lower, upper);
}

BasePerformance update(BaseOptimizerState& state, const problems::ProblemInstance& problem,
                       const BaseControl& control, Rng& rng) {
  control.validate();
  const std::size_t np = state.size();
  const double old_best = state.best_f;

  std::vector<Vector> trials;
  trials.reserve(np);
  for (std::size_t i = 0; i < np; ++i) {
    Vector donor = mutate(state, control.strategy, control.F, i, rng);
    clamp_to_box(donor, problem.lower_bound(), problem.upper_bound());
    trials.push_back(crossover_bin(state.population.row(i), donor, control.CR, rng));
  }

  for (std::size_t i = 0; i < np; ++i) {
    const double f = problem.evaluate(trials[i]);
    if (f <= state.fitness[i]) {
      std::copy(trials[i].begin(), trials[i].end(), state.population.row(i).begin());
      state.fitness[i] = f;
      if (f < state.best_f) {
        state.best_f = f;
        state.best_x = trials[i];
      }
    }
  }
  state.generation += 1;
  state.evals_used += np;
  return {state.best_f, old_best - state.best_f, state.evals_used};
}

}  // namespace metabbo::baseopt
