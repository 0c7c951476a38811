#pragma once

// Train/test orchestration, model persistence and reporting.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "metabbo/environment.hpp"
#include "metabbo/metaopt.hpp"
#include "metabbo/metrics.hpp"
#include "metabbo/problems.hpp"

namespace metabbo::harness {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kBaselineName = "DE";

// --- seeding ----------------------------------------------------------------

/// Seed for replication `replication` of problem (function_id, dim).
std::uint64_t replication_seed(std::uint64_t master_seed, int function_id, int dim, std::size_t replication);

/// Seed for a named sub-stream of a training run ("agent", "episodes", ...).
std::uint64_t stream_seed(std::uint64_t master_seed, std::string_view stream);

// --- training -----------------------------------------------------------------

struct TrainOptions {
  std::size_t max_episodes = 1000;
  std::size_t max_steps_per_episode = 500;
  std::size_t stop_window = 10;
  double stop_threshold = 100.0;
  std::uint64_t master_seed = 0;
  std::size_t pop_size = baseopt::kDefaultPopSize;
  std::vector<int> dims = {10};
  std::vector<std::uint64_t> train_instances = {1, 2, 3, 4, 5};
  /// Episodes per reporting epoch; 0 means one episode per seen function.
  std::size_t epoch_length = 0;
  metaopt::DqnConfig dqn{};
  metaopt::DdpgConfig ddpg{};
  metaopt::DeMetaConfig de_meta{};

  /// Throws configuration error on inconsistent values.
  void validate() const;
};

struct EpisodeLog {
  std::size_t episode = 0;
  int function_id = 0;
  int dim = 0;
  std::uint64_t instance_seed = 0;
  std::size_t steps = 0;
  double episode_return = 0.0;
  double initial_error = 0.0;
  double final_error = 0.0;
};

struct EpochLog {
  std::size_t epoch = 0;
  std::size_t first_episode = 0;
  std::size_t episodes = 0;
  metrics::MetaAggregate perf;  // perf = -final error
};

struct TrainingLog {
  std::vector<EpisodeLog> episodes;
  std::vector<EpochLog> epochs;
  bool stopped_by_threshold = false;
  std::map<int, std::uint64_t> evaluation_audit;

  std::string to_csv() const;
};

struct AgentModel {
  int format_version = kModelFormatVersion;
  std::string components;
  metaopt::AgentSpec spec;
  std::string config_hash;
  std::size_t episodes = 0;
  std::vector<int> train_dims;
  std::vector<int> seen;
  std::shared_ptr<const metaopt::MetaOptimizer> agent;
};

struct TrainResult {
  AgentModel model;
  TrainingLog log;
};

/// Sliding-window stop rule: true at the first episode index e (0-based) with
/// e + 1 >= window and mean(returns[e - window + 1 .. e]) >= threshold.
bool should_stop(const std::vector<double>& returns, std::size_t window, double threshold);

TrainResult train(const std::string& components, const problems::ProblemSplit& split, const TrainOptions& opts);

/// Runs one episode loop with an already-built agent (used by train and tests).
TrainResult train_agent(std::unique_ptr<metaopt::MetaOptimizer> agent, const std::string& components,
                        const problems::ProblemSplit& split, const TrainOptions& opts);

// --- model files ----------------------------------------------------------------

void save_model(const AgentModel& model, const std::filesystem::path& path);
/// Throws parse error on malformed files and incompatible-model on version
/// or component mismatches.
AgentModel load_model(const std::filesystem::path& path);
std::string model_to_string(const AgentModel& model);
AgentModel model_from_string(const std::string& text);

// --- testing --------------------------------------------------------------------

using Policy = std::function<baseopt::BaseControl(const environment::Observation&)>;

Policy fixed_policy(baseopt::BaseControl control);
Policy agent_policy(std::shared_ptr<const metaopt::MetaOptimizer> agent);

struct RunRecord {
  std::string components;
  int function_id = 0;
  int dim = 0;
  std::uint64_t instance_seed = 0;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  std::vector<double> trace;  // best-so-far error per generation, generation 0 first
  double final_best_f = 0.0;
  double final_error = 0.0;
  std::size_t evals_used = 0;
  double wall_clock_ms = 0.0;
};

struct RunOptions {
  std::size_t max_generations = 500;
  std::size_t pop_size = baseopt::kDefaultPopSize;
  double solve_tolerance = 1e-8;
};

/// One frozen-policy optimisation run. The trace is padded with the final
/// best error when the run stops early on the solve tolerance.
RunRecord run_policy(const problems::ProblemInstance& problem, const Policy& policy, std::uint64_t seed,
                     const RunOptions& options);

/// Value entered into tables: final error, with errors at or below the
/// solve tolerance reported as 0.
double reported_value(const RunRecord& run, double solve_tolerance);

struct TestOptions {
  std::vector<int> dims = {10};
  std::size_t replications = 31;
  std::uint64_t master_seed = 0;
  std::uint64_t instance_seed = 1;
  std::string baseline = kBaselineName;
  double alpha = metrics::kDefaultAlpha;
  std::size_t threads = 1;
  RunOptions run{};
};

struct ComparisonRow {
  int function_id = 0;
  int dim = 0;
  metrics::Membership membership = metrics::Membership::seen;
  metrics::ComparisonMark mark;
};

struct MarkCounts {
  std::size_t better = 0;
  std::size_t worse = 0;
  std::size_t equal = 0;
};

struct TestReport {
  std::string components;
  std::string baseline;
  std::vector<int> dims;
  std::size_t replications = 0;
  std::size_t generations = 0;
  metrics::PerformanceTable algorithm;
  metrics::PerformanceTable baseline_table;
  std::vector<ComparisonRow> comparisons;  // parallel to algorithm.rows()
  std::vector<RunRecord> algorithm_runs;
  std::vector<RunRecord> baseline_runs;
  std::map<int, std::optional<double>> transferability;  // per tested dim
  std::optional<double> generalization;
  std::optional<int> train_dim;

  MarkCounts counts(std::optional<int> dim = std::nullopt) const;
};

/// Tests `model` (driving DE through `components`) against the baseline on
/// every function of the split, for each requested dimension.
TestReport test(const std::string& components, const AgentModel& model, const problems::ProblemSplit& split,
                const TestOptions& opts);

/// Same protocol with explicit policies; used for baseline self-comparison
/// and for policies that do not come from a model file.
TestReport test_policies(const std::string& components, const Policy& algorithm, const std::string& baseline_name,
                         const Policy& baseline, const problems::ProblemSplit& split, const TestOptions& opts);

/// Resolves --baseline names; only fixed-control DE ("DE") is registered.
Policy baseline_policy(const std::string& name);

// --- reports ----------------------------------------------------------------------

enum class ReportFormat { csv, latex, traces };

ReportFormat parse_report_format(const std::string& text);

/// "1.6059e-1 (4.79e-2)": 4 mantissa decimals for the mean, 2 for the spread.
std::string format_cell(double v_avg, double v_std);
/// Compact scientific notation with `decimals` mantissa digits ("e-1", "e+0").
std::string format_sci(double value, int decimals);

std::string report_csv(const TestReport& report);
std::string report_summary_csv(const TestReport& report);
std::string report_latex(const TestReport& report, int dim);
std::string trace_csv(const std::vector<RunRecord>& runs, int function_id, int dim);

/// Writes the report files for `format` under `dir`; returns the paths written.
std::vector<std::filesystem::path> emit_report(const TestReport& report, ReportFormat format,
                                               const std::filesystem::path& dir);

}  // namespace metabbo::harness
