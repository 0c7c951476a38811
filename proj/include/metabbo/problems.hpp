#pragma once

// BBOB2009 noiseless suite and the seen/unseen problem split.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "metabbo/matrix.hpp"
#include "metabbo/rng.hpp"

namespace metabbo::problems {

inline constexpr int kNumFunctions = 24;
inline constexpr double kLowerBound = -5.0;
inline constexpr double kUpperBound = 5.0;

struct InstanceData;

/// An immutable noiseless BBOB function instance on the box [-5, 5]^D.
///
/// Copies share the underlying transformation data; evaluation is pure and
/// may be called concurrently.
class ProblemInstance {
 public:
  int function_id() const noexcept;
  std::size_t dim() const noexcept;
  std::uint64_t instance_seed() const noexcept;
  double lower_bound() const noexcept { return kLowerBound; }
  double upper_bound() const noexcept { return kUpperBound; }
  const Vector& x_opt() const noexcept;
  double f_opt() const noexcept;
  std::string name() const;

  /// Objective value. Throws dimension error on length mismatch and domain
  /// error on non-finite input. Defined on all of R^D.
  double evaluate(std::span<const double> x) const;

 private:
  friend ProblemInstance make_bbob(int, int, std::uint64_t);
  explicit ProblemInstance(std::shared_ptr<const InstanceData> data) : data_(std::move(data)) {}
  std::shared_ptr<const InstanceData> data_;
};

/// Builds BBOB function `function_id` (1..24) in `dim` >= 2 dimensions.
/// Identical arguments give bitwise-identical instances.
ProblemInstance make_bbob(int function_id, int dim, std::uint64_t instance_seed);

/// Human-readable BBOB function name ("Sphere", "Rastrigin", ...).
std::string function_name(int function_id);

/// Random orthogonal matrix (Gram-Schmidt on Gaussian draws).
Matrix random_rotation(std::size_t dim, Rng& rng);

/// Uniform population inside the box; size must be at least 4.
Matrix initialize_population(const ProblemInstance& problem, std::size_t size, Rng& rng);

enum class SplitMode { easy_train, all_train, custom };

struct ProblemSplit {
  std::vector<int> seen;
  std::vector<int> unseen;
  std::vector<int> dims;

  bool is_seen(int function_id) const;
};

/// Functions held out of training in easy-train mode.
inline constexpr int kEasyTrainUnseen[] = {1, 5, 6, 10, 15, 20};

/// Partitions {1..24}. In custom mode `custom_seen` lists the training
/// functions; every other function is unseen.
ProblemSplit split_problem_set(SplitMode mode, std::vector<int> dims,
                               std::span<const int> custom_seen = {});

SplitMode parse_split_mode(const std::string& text);

/// Parses "easy-train", "all-train" or "custom:1,2,3" (training functions).
ProblemSplit parse_split(const std::string& text, std::vector<int> dims);

}  // namespace metabbo::problems
