#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "metabbo/error.hpp"
#include "metabbo/harness.hpp"

namespace metabbo::harness {

Policy fixed_policy(baseopt::BaseControl control) {
  control.validate();
  return [control](const environment::Observation&) { return control; };
}

Policy agent_policy(std::shared_ptr<const metaopt::MetaOptimizer> agent) {
  if (!agent) throw Error(Errc::configuration, "null agent");
  return [agent](const environment::Observation& obs) { return agent->control_for(obs); };
}

Policy baseline_policy(const std::string& name) {
  if (name == kBaselineName) return fixed_policy(baseopt::kDefaultControl);
  throw Error(Errc::registry, "unknown baseline '" + name + "' (available: DE)");
}

RunRecord run_policy(const problems::ProblemInstance& problem, const Policy& policy, std::uint64_t seed,
                     const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  environment::EnvConfig cfg;
  cfg.pop_size = options.pop_size;
  cfg.max_steps_per_episode = options.max_generations;
  cfg.mode = environment::Mode::test;
  cfg.designated = problem;
  cfg.solve_tolerance = options.solve_tolerance;
  environment::Environment env(cfg);
  Rng rng(seed);
  environment::Observation obs = env.reset(rng);
  while (!env.done()) obs = env.step(policy(obs)).observation;

  RunRecord rec;
  rec.function_id = problem.function_id();
  rec.dim = static_cast<int>(problem.dim());
  rec.instance_seed = problem.instance_seed();
  rec.seed = seed;
  rec.trace = env.error_trace();
  rec.trace.resize(options.max_generations + 1, rec.trace.back());
  rec.final_best_f = env.state().best_f;
  rec.final_error = env.best_error();
  rec.evals_used = env.state().evals_used;
  rec.wall_clock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

double reported_value(const RunRecord& run, double solve_tolerance) {
  return run.final_error <= solve_tolerance ? 0.0 : run.final_error;
}

MarkCounts TestReport::counts(std::optional<int> dim) const {
  MarkCounts c;
  for (const auto& row : comparisons) {
    if (dim && row.dim != *dim) continue;
    switch (row.mark.mark) {
      case metrics::Mark::better: ++c.better; break;
      case metrics::Mark::worse: ++c.worse; break;
      case metrics::Mark::equal: ++c.equal; break;
    }
  }
  return c;
}

namespace {

struct Job {
  int function_id;
  int dim;
  std::size_t replication;
  bool baseline;
};

std::vector<int> tested_functions(const problems::ProblemSplit& split) {
  std::vector<int> out(split.seen);
  out.insert(out.end(), split.unseen.begin(), split.unseen.end());
  std::sort(out.begin(), out.end());
  return out;
}

// Runs every job on `threads` workers; results land in job order.
std::vector<RunRecord> run_jobs(const std::vector<Job>& jobs, const std::map<std::pair<int, int>, problems::ProblemInstance>& problems,
                                const Policy& algorithm, const Policy& baseline, const TestOptions& opts) {
  std::vector<RunRecord> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const Job& job = jobs[i];
        const auto& problem = problems.at({job.function_id, job.dim});
        const std::uint64_t seed = replication_seed(opts.master_seed, job.function_id, job.dim, job.replication);
        results[i] = run_policy(problem, job.baseline ? baseline : algorithm, seed, opts.run);
        results[i].replication = job.replication;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(opts.threads, jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace

TestReport test_policies(const std::string& components, const Policy& algorithm, const std::string& baseline_name,
                         const Policy& baseline, const problems::ProblemSplit& split, const TestOptions& opts) {
  if (opts.replications < 2) throw Error(Errc::configuration, "at least 2 replications are required");
  if (opts.dims.empty()) throw Error(Errc::configuration, "at least one test dimension is required");
  if (opts.run.max_generations < 1) throw Error(Errc::configuration, "max generations must be at least 1");
  const std::vector<int> functions = tested_functions(split);
  if (functions.empty()) throw Error(Errc::configuration, "split contains no functions");

  std::map<std::pair<int, int>, problems::ProblemInstance> instances;
  std::vector<Job> jobs;
  for (int dim : opts.dims) {
    for (int fid : functions) {
      instances.emplace(std::make_pair(fid, dim), problems::make_bbob(fid, dim, opts.instance_seed));
      for (std::size_t r = 0; r < opts.replications; ++r) {
        jobs.push_back({fid, dim, r, false});
        jobs.push_back({fid, dim, r, true});
      }
    }
  }
  std::vector<RunRecord> runs = run_jobs(jobs, instances, algorithm, baseline, opts);

  TestReport report;
  report.components = components;
  report.baseline = baseline_name;
  report.dims = opts.dims;
  report.replications = opts.replications;
  report.generations = opts.run.max_generations;
  std::size_t idx = 0;
  for (int dim : opts.dims) {
    for (int fid : functions) {
      std::vector<double> alg_values;
      std::vector<double> base_values;
      for (std::size_t r = 0; r < opts.replications; ++r) {
        for (int which = 0; which < 2; ++which, ++idx) {
          RunRecord& run = runs[idx];
          run.components = jobs[idx].baseline ? baseline_name : components;
          const double v = reported_value(run, opts.run.solve_tolerance);
          if (jobs[idx].baseline) {
            base_values.push_back(v);
            report.baseline_runs.push_back(std::move(run));
          } else {
            alg_values.push_back(v);
            report.algorithm_runs.push_back(std::move(run));
          }
        }
      }
      const auto membership = split.is_seen(fid) ? metrics::Membership::seen : metrics::Membership::unseen;
      ComparisonRow row{fid, dim, membership, metrics::wilcoxon_ranksum(alg_values, base_values, opts.alpha)};
      report.algorithm.add_row(fid, dim, membership, std::move(alg_values));
      report.baseline_table.add_row(fid, dim, membership, std::move(base_values));
      report.comparisons.push_back(row);
    }
  }

  for (int dim : opts.dims) {
    try {
      report.transferability[dim] = metrics::transferability_index(report.algorithm.filter_dim(dim));
    } catch (const Error&) {
      report.transferability[dim] = std::nullopt;
    }
  }
  return report;
}

TestReport test(const std::string& components, const AgentModel& model, const problems::ProblemSplit& split,
                const TestOptions& opts) {
  if (model.format_version != kModelFormatVersion) {
    throw Error(Errc::incompatible_model, "model format version " + std::to_string(model.format_version));
  }
  const metaopt::AgentKind kind = metaopt::parse_components(components);
  if (model.components != components || !model.agent || model.agent->kind() != kind) {
    throw Error(Errc::incompatible_model, "model holds " + model.components + ", not " + components);
  }
  TestReport report = test_policies(components, agent_policy(model.agent), opts.baseline,
                                    baseline_policy(opts.baseline), split, opts);

  if (model.train_dims.size() == 1) {
    const int train_dim = model.train_dims.front();
    report.train_dim = train_dim;
    std::vector<int> diff_dims;
    for (int d : opts.dims) {
      if (d != train_dim) diff_dims.push_back(d);
    }
    const bool has_train_dim = std::find(opts.dims.begin(), opts.dims.end(), train_dim) != opts.dims.end();
    if (has_train_dim && !diff_dims.empty() && !split.seen.empty()) {
      metrics::DeltaTable delta;
      for (std::size_t i = 0; i < report.algorithm.rows().size(); ++i) {
        const auto& a = report.algorithm.rows()[i];
        const auto& b = report.baseline_table.rows()[i];
        delta[{a.function_id, a.dim}] = a.perf() - b.perf();
      }
      report.generalization = metrics::generalization_index(delta, train_dim, diff_dims, split.seen);
    }
  }
  return report;
}

}  // namespace metabbo::harness
