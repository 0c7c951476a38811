#pragma once

// Parameterized differential evolution: the inner-level solver whose
// per-generation control (F, CR, mutation strategy) is set from outside.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "metabbo/matrix.hpp"
#include "metabbo/problems.hpp"
#include "metabbo/rng.hpp"

namespace metabbo::baseopt {

enum class Strategy { rand_1 = 0, best_1 = 1, current_to_best_1 = 2, rand_2 = 3 };

inline constexpr std::array<Strategy, 4> kStrategies = {Strategy::rand_1, Strategy::best_1,
                                                        Strategy::current_to_best_1, Strategy::rand_2};

std::string_view to_string(Strategy s) noexcept;

/// Number of mutually distinct population members, besides the target,
/// that the strategy draws.
std::size_t required_donors(Strategy s) noexcept;

struct BaseControl {
  double F = 0.5;
  double CR = 0.9;
  Strategy strategy = Strategy::rand_1;

  /// Throws invalid-control unless F and CR are finite and within [0, 1].
  void validate() const;

  friend bool operator==(const BaseControl&, const BaseControl&) = default;
};

inline constexpr BaseControl kDefaultControl{};
inline constexpr std::size_t kDefaultPopSize = 50;

struct BaseOptimizerState {
  Matrix population;
  Vector fitness;
  Vector best_x;
  double best_f = 0.0;
  std::size_t generation = 0;
  std::size_t evals_used = 0;

  std::size_t size() const noexcept { return population.rows(); }
  std::size_t best_index() const;
};

struct BasePerformance {
  double best_f = 0.0;
  double improvement = 0.0;
  std::size_t evals_used = 0;
};

BaseOptimizerState init(const problems::ProblemInstance& problem, std::size_t pop_size, Rng& rng);

/// Donor vector from explicitly chosen population members. `donors` holds the
/// r1, r2, ... indices in the order the strategy formula uses them.
Vector mutate_with_indices(const Matrix& population, std::size_t best_index, Strategy strategy, double F,
                           std::size_t target_index, std::span<const std::size_t> donors);

/// Donor vector with r1.. drawn uniformly, mutually distinct and distinct
/// from the target. Throws strategy-arity if the population is too small.
Vector mutate(const BaseOptimizerState& state, Strategy strategy, double F, std::size_t target_index, Rng& rng);

/// Binomial crossover. Draws j_rand first, then one uniform per coordinate.
Vector crossover_bin(std::span<const double> target, std::span<const double> donor, double CR, Rng& rng);

void clamp_to_box(std::span<double> x, double lower, double upper);

/// One synchronous DE generation: mutate, clamp, crossover, greedy
/// one-to-one selection (trial wins ties).
BasePerformance update(BaseOptimizerState& state, const problems::ProblemInstance& problem,
                       const BaseControl& control, Rng& rng);

}  // namespace metabbo::baseopt
