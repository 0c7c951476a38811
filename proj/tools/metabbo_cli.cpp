// metabbo: train meta-optimizers on BBOB and test them against fixed-control DE.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "metabbo/error.hpp"
#include "metabbo/harness.hpp"

using namespace metabbo;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& text, const char* what) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::logic_error&) {
      throw Error(Errc::configuration, std::string("bad ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw Error(Errc::configuration, std::string("empty ") + what + " list");
  return out;
}

// Config file lines "key = value" become "--key value" ahead of the real
// arguments; options take the last value so flags win.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::configuration, "cannot read config file " + path);
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::configuration, path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty() || key == "config") {
      throw Error(Errc::configuration, path + ":" + std::to_string(lineno) + ": bad key");
    }
    args.push_back("--" + key);
    args.push_back(trim(line.substr(eq + 1)));
  }
  return args;
}

std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> out;
  std::string config;
  std::size_t sub_pos = std::string::npos;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[++i];
      continue;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      continue;
    }
    if (sub_pos == std::string::npos && (args[i] == "train" || args[i] == "test" || args[i] == "list")) {
      sub_pos = out.size();
    }
    out.push_back(args[i]);
  }
  if (config.empty()) return out;
  if (sub_pos == std::string::npos) throw Error(Errc::configuration, "--config requires a subcommand");
  const auto extra = read_config(config);
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, extra.begin(), extra.end());
  return out;
}

struct TrainArgs {
  std::string components;
  std::string problem_set = "bbob";
  std::string split = "easy-train";
  std::string dims = "10";
  std::string instances = "1,2,3,4,5";
  std::string out;
  std::string log;
  harness::TrainOptions opts;
};

struct TestArgs {
  std::string components;
  std::string model;
  std::string problem_set = "bbob";
  std::string split;
  std::string dims = "10";
  std::string report_dir = "reports";
  std::string format = "csv";
  harness::TestOptions opts;
};

void check_problem_set(const std::string& name) {
  if (name != "bbob") throw Error(Errc::configuration, "unknown problem set '" + name + "' (available: bbob)");
}

int run_train(TrainArgs& a) {
  check_problem_set(a.problem_set);
  a.opts.dims = parse_numbers<int>(a.dims, "dimension");
  a.opts.train_instances = parse_numbers<std::uint64_t>(a.instances, "instance");
  const auto split = problems::parse_split(a.split, a.opts.dims);
  const auto result = harness::train(a.components, split, a.opts);
  harness::save_model(result.model, a.out);
  const std::string log_path = a.log.empty() ? a.out + ".log.csv" : a.log;
  std::ofstream log(log_path, std::ios::binary | std::ios::trunc);
  if (!log) throw Error(Errc::io, "cannot open " + log_path + " for writing");
  log << result.log.to_csv();
  if (!log.flush()) throw Error(Errc::io, "write failed for " + log_path);
  std::printf("trained %s for %zu episodes%s; model written to %s\n", a.components.c_str(),
              result.model.episodes, result.log.stopped_by_threshold ? " (stopped by threshold)" : "",
              a.out.c_str());
  return 0;
}

int run_test(TestArgs& a) {
  check_problem_set(a.problem_set);
  a.opts.dims = parse_numbers<int>(a.dims, "dimension");
  std::vector<harness::ReportFormat> formats;
  for (const auto& f : split_list(a.format)) formats.push_back(harness::parse_report_format(f));
  if (formats.empty()) throw Error(Errc::configuration, "empty --format list");
  const auto model = harness::load_model(a.model);
  // Without --split the seen set recorded at training time decides membership.
  const auto split = a.split.empty()
                         ? problems::split_problem_set(problems::SplitMode::custom, a.opts.dims, model.seen)
                         : problems::parse_split(a.split, a.opts.dims);
  const auto report = harness::test(a.components, model, split, a.opts);
  for (auto f : formats) {
    for (const auto& p : harness::emit_report(report, f, a.report_dir)) std::printf("wrote %s\n", p.string().c_str());
  }
  for (int dim : report.dims) {
    const auto c = report.counts(dim);
    std::printf("D=%d +/-/= %zu/%zu/%zu\n", dim, c.better, c.worse, c.equal);
  }
  return 0;
}

int run_list() {
  std::printf("components:\n");
  for (const auto& name : metaopt::registered_components()) std::printf("  %s\n", name.c_str());
  std::printf("baselines:\n  %s\n", harness::kBaselineName);
  std::printf("problem sets:\n  bbob\n");
  for (int f = 1; f <= problems::kNumFunctions; ++f) std::printf("    F%d %s\n", f, problems::function_name(f).c_str());
  std::printf("splits:\n  easy-train\n  all-train\n  custom:<seen ids>\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meta-black-box optimization on BBOB"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "key=value file with defaults for the subcommand's flags");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "train a meta-optimizer and save the model");
  train->add_option("--components", tr.components, "METAOPT_BASEOPT_LEARNEDOBJ name")->required();
  train->add_option("--problem-set", tr.problem_set)->capture_default_str();
  train->add_option("--split", tr.split, "easy-train, all-train or custom:<ids>")->capture_default_str();
  train->add_option("--dim,--dims", tr.dims, "training dimensions, comma separated")->capture_default_str();
  train->add_option("--instances", tr.instances, "training instance seeds")->capture_default_str();
  train->add_option("--max-episodes", tr.opts.max_episodes)->capture_default_str();
  train->add_option("--max-steps", tr.opts.max_steps_per_episode, "steps per episode")->capture_default_str();
  train->add_option("--stop-window", tr.opts.stop_window)->capture_default_str();
  train->add_option("--stop-threshold", tr.opts.stop_threshold)->capture_default_str();
  train->add_option("--seed", tr.opts.master_seed)->capture_default_str();
  train->add_option("--pop-size", tr.opts.pop_size)->capture_default_str();
  train->add_option("--epoch-length", tr.opts.epoch_length)->capture_default_str();
  train->add_option("--out", tr.out, "model file")->required();
  train->add_option("--log", tr.log, "training log CSV (default <out>.log.csv)");

  TestArgs te;
  auto* test = app.add_subcommand("test", "test a saved model against the baseline");
  test->add_option("--components", te.components)->required();
  test->add_option("--model", te.model)->required();
  test->add_option("--problem-set", te.problem_set)->capture_default_str();
  test->add_option("--split", te.split, "defaults to the split recorded in the model");
  test->add_option("--dims,--dim", te.dims)->capture_default_str();
  test->add_option("--replications", te.opts.replications)->capture_default_str();
  test->add_option("--baseline", te.opts.baseline)->capture_default_str();
  test->add_option("--report-dir", te.report_dir)->capture_default_str();
  test->add_option("--format", te.format, "csv, latex, traces (comma separated)")->capture_default_str();
  test->add_option("--seed", te.opts.master_seed)->capture_default_str();
  test->add_option("--max-steps", te.opts.run.max_generations, "generations per run")->capture_default_str();
  test->add_option("--pop-size", te.opts.run.pop_size)->capture_default_str();
  test->add_option("--instance", te.opts.instance_seed)->capture_default_str();
  test->add_option("--alpha", te.opts.alpha)->capture_default_str();
  test->add_option("--threads", te.opts.threads)->capture_default_str();

  auto* list = app.add_subcommand("list", "list registered components and problems");

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
    if (train->parsed()) return run_train(tr);
    if (test->parsed()) return run_test(te);
    if (list->parsed()) return run_list();
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return is_configuration_error(e.code()) ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
