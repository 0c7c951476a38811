// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "metabbo/harness.hpp"
#include "oracles.hpp"

using namespace metabbo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// --- AC1 ---------------------------------------------------------------------

Outcome bbob_correctness() {
  double worst_opt = 0.0;
  std::size_t violations = 0;
  for (int dim : {2, 5, 10}) {
    for (int fid = 1; fid <= problems::kNumFunctions; ++fid) {
      const auto p = problems::make_bbob(fid, dim, 1);
      worst_opt = std::max(worst_opt, std::abs(p.evaluate(p.x_opt()) - p.f_opt()));
      Rng rng(static_cast<std::uint64_t>(1000 * fid + dim));
      Vector x(static_cast<std::size_t>(dim));
      for (int k = 0; k < 10000; ++k) {
        for (auto& v : x) v = rng.uniform(p.lower_bound(), p.upper_bound());
        if (!(p.evaluate(x) >= p.f_opt())) ++violations;
      }
    }
  }
  return {worst_opt <= 1e-9 && violations == 0,
          fmt("max |f(x_opt)-f_opt| = %.2e", worst_opt) + ", points below f_opt = " + std::to_string(violations)};
}

// --- AC2 ---------------------------------------------------------------------

Outcome baseline_sanity() {
  const auto p = problems::make_bbob(1, 10, 1);
  harness::RunOptions ro;
  ro.max_generations = 500;
  ro.pop_size = 50;
  ro.solve_tolerance = 0.0;  // run the full budget
  std::vector<double> finals;
  std::vector<double> gains;
  for (std::size_t r = 0; r < 31; ++r) {
    const auto rec = harness::run_policy(p, harness::baseline_policy("DE"), harness::replication_seed(0, 1, 10, r), ro);
    finals.push_back(rec.final_error);
    gains.push_back(rec.final_error > 0 ? rec.trace.front() / rec.final_error : INFINITY);
  }
  const double med = median(finals);
  const double min_gain = *std::min_element(gains.begin(), gains.end());
  return {med <= 1.0 && min_gain >= 1e3,
          fmt("median final error %.3e", med) + fmt(", smallest improvement factor %.3e", min_gain)};
}

// --- AC3 ---------------------------------------------------------------------

Outcome gradient_oracle() {
  using approximator::Activation;
  Rng rng(2024);
  const Activation acts[] = {Activation::identity, Activation::relu, Activation::tanh, Activation::sigmoid};
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::size_t> sizes;
    std::vector<Activation> a;
    for (int l = 0; l < 4; ++l) sizes.push_back(2 + rng.index(7));
    for (int l = 0; l < 3; ++l) a.push_back(acts[rng.index(4)]);
    approximator::DenseNet net(sizes, a);
    net.initialize(rng);
    Vector x(net.input_size()), c(net.output_size());
    for (auto& v : x) v = rng.uniform(-1, 1);
    for (auto& v : c) v = rng.uniform(-1, 1);
    auto loss = [&] {
      const Vector y = net.forward(x);
      double s = 0;
      for (std::size_t k = 0; k < y.size(); ++k) s += c[k] * y[k];
      return s;
    };
    const auto g = net.backward(x, c);
    auto params = net.parameters();
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double keep = params[k];
      params[k] = keep + h;
      const double fp = loss();
      params[k] = keep - h;
      const double fm = loss();
      params[k] = keep;
      const double fd = (fp - fm) / (2 * h);
      worst = std::max(worst, std::abs(fd - g.parameters[k]) / std::max({std::abs(fd), std::abs(g.parameters[k]), 1e-4}));
    }
  }
  return {worst < 1e-4, fmt("max relative error %.2e over 100 nets", worst)};
}

// --- AC4 ---------------------------------------------------------------------

Outcome wilcoxon_oracle() {
  Rng rng(99);
  double worst = 0.0;
  std::size_t samples = 0;
  for (int round = 0; round < 5; ++round) {  // 5 x 49 size pairs
    for (std::size_t n1 = 2; n1 <= 8; ++n1) {
      for (std::size_t n2 = 2; n2 <= 8; ++n2, ++samples) {
        std::vector<double> a(n1), b(n2);
        for (auto& v : a) v = static_cast<double>(rng.index(5));
        for (auto& v : b) v = static_cast<double>(rng.index(5) + rng.index(3));
        const double exact = metrics::rank_sum_exact(a, b).p_value;
        worst = std::max(worst, std::abs(exact - oracles::rank_sum_enumerated(a, b)));
      }
    }
  }
  const std::vector<double> same{3, 1, 4, 1, 5};
  const auto mark = metrics::wilcoxon_ranksum(same, same);
  return {worst <= 1e-9 && mark.mark == metrics::Mark::equal,
          fmt("max |p_exact - p_enum| = %.2e", worst) + " over " + std::to_string(samples) +
              " samples, identical samples -> '" + mark.symbol() + "'"};
}

// --- AC5 ---------------------------------------------------------------------

Outcome metric_golden() {
  using metrics::Membership;
  std::vector<std::string> bad;
  metrics::PerformanceTable t;
  t.add_row(2, 10, Membership::seen, {10, 10});
  t.add_row(1, 10, Membership::unseen, {5, 5});
  if (std::abs(metrics::transferability_index(t) + 0.5) > 1e-12) bad.push_back("TI");

  const int diff[] = {30};
  const int seen[] = {1};
  if (std::abs(metrics::generalization_index({{{1, 10}, -2.0}, {{1, 30}, -5.0}}, 10, diff, seen) + 3.0) > 1e-12) {
    bad.push_back("GI derived");
  }
  const int seen3[] = {2, 3, 4};
  const int diff2[] = {30, 50};
  metrics::DeltaTable flat;
  for (int f : seen3) {
    for (int dim : {10, 30, 50}) flat[{f, dim}] = -0.25 * f;
  }
  if (std::abs(metrics::generalization_index(flat, 10, diff2, seen3)) > 1e-12) bad.push_back("GI trivial");

  if (std::abs(metrics::spacing({{0}, {1}, {3}}) - std::sqrt(1.0 / 3.0)) > 1e-12) bad.push_back("spacing");
  if (metrics::hypervolume({{1, 3}, {3, 1}}, {4, 4}) != 5.0) bad.push_back("HV");

  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    metrics::Front a(1 + rng.index(8)), r(1 + rng.index(8));
    const std::size_t m = 2 + rng.index(2);
    for (auto& p : a) {
      p.resize(m);
      for (auto& v : p) v = rng.uniform();
    }
    for (auto& p : r) {
      p.resize(m);
      for (auto& v : p) v = rng.uniform();
    }
    if (metrics::igd(a, r) != metrics::gd(r, a)) {
      bad.push_back("igd/gd duality");
      break;
    }
  }
  std::string detail = "TI, GI, spacing, HV, igd/gd duality";
  if (!bad.empty()) {
    detail = "mismatch:";
    for (const auto& b : bad) detail += " " + b;
  }
  return {bad.empty(), detail};
}

// --- AC6 ---------------------------------------------------------------------

Outcome hv_cross_check() {
  Rng rng(31);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    metrics::Front f;
    const std::size_t n = 1 + rng.index(15);
    for (std::size_t i = 0; i < n; ++i) f.push_back({rng.uniform(), rng.uniform()});
    const double exact = metrics::hypervolume(f, {1, 1});
    const double mc = oracles::hypervolume_mc(f, {0, 0}, {1, 1}, 1000000, rng);
    worst = std::max(worst, std::abs(exact - mc) / exact);
  }
  return {worst <= 0.01, fmt("max relative deviation from Monte Carlo %.2e", worst)};
}

// --- AC7 ---------------------------------------------------------------------

Outcome training_efficacy() {
  const auto split = problems::split_problem_set(problems::SplitMode::easy_train, {10});
  harness::TrainOptions to;
  to.max_episodes = 200;
  to.max_steps_per_episode = 200;
  to.dims = {10};
  to.master_seed = 1;
  const auto trained = harness::train("DQN_DE_MS", split, to);

  harness::TestOptions te;
  te.dims = {10};
  te.replications = 15;
  te.master_seed = 1;
  te.run.max_generations = to.max_steps_per_episode;  // test at the trained horizon
  const auto report = harness::test("DQN_DE_MS", trained.model, split, te);

  std::size_t ok = 0, wins = 0;
  std::string marks;
  for (const auto& row : report.comparisons) {
    if (row.membership != metrics::Membership::seen) continue;
    ok += row.mark.mark != metrics::Mark::worse;
    wins += row.mark.mark == metrics::Mark::better;
    marks += row.mark.symbol();
  }
  const std::size_t seen = split.seen.size();
  return {10 * ok >= 6 * seen && wins >= 4,
          "seen functions +/= " + std::to_string(ok) + "/" + std::to_string(seen) + ", + " + std::to_string(wins) +
              " (marks " + marks + ")"};
}

// --- AC8 ---------------------------------------------------------------------

Outcome meta_de_elitism() {
  const int seen[] = {1};
  const auto split = problems::split_problem_set(problems::SplitMode::custom, {10}, seen);
  harness::TrainOptions to;
  to.dims = {10};
  to.master_seed = 3;
  to.max_steps_per_episode = 100;
  to.stop_threshold = 1e9;  // meta-generations, not the return window, bound this run
  const std::size_t per_gen = to.de_meta.population_size * to.de_meta.episodes_per_candidate;
  to.max_episodes = per_gen * 11;  // initial population plus 10 generations
  const auto trained = harness::train("DE_DE_FCR", split, to);
  const auto& agent = dynamic_cast<const metaopt::DeMetaAgent&>(*trained.model.agent);

  const auto& hist = agent.best_history();
  bool monotone = hist.size() >= 11;
  for (std::size_t i = 1; i < hist.size(); ++i) monotone = monotone && hist[i] >= hist[i - 1];

  const auto best = agent.best_candidate();
  const auto p = problems::make_bbob(1, 10, 1);
  harness::RunOptions ro;
  ro.max_generations = to.max_steps_per_episode;
  std::vector<double> tuned, base;
  for (std::size_t r = 0; r < 15; ++r) {
    const std::uint64_t seed = harness::replication_seed(3, 1, 10, r);
    tuned.push_back(harness::reported_value(
        harness::run_policy(p, harness::fixed_policy({best[0], best[1], baseopt::Strategy::rand_1}), seed, ro), 1e-8));
    base.push_back(harness::reported_value(harness::run_policy(p, harness::baseline_policy("DE"), seed, ro), 1e-8));
  }
  const auto mark = metrics::wilcoxon_ranksum(tuned, base);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu meta-generations, best fitness %s, best (F, CR) = (%.3f, %.3f), mark '%c'",
                agent.meta_generation(), monotone ? "non-decreasing" : "DECREASED", best[0], best[1], mark.symbol());
  return {monotone && agent.meta_generation() >= 10 && mark.mark != metrics::Mark::worse, buf};
}

// --- AC9 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + METABBO_CLI_PATH + "\" " + args + " > /dev/null";
  return std::system(cmd.c_str());
}

Outcome end_to_end_determinism() {
  const fs::path root = fs::current_path() / "acceptance_determinism";
  fs::remove_all(root);
  for (const char* run : {"a", "b"}) {
    const fs::path dir = root / run;
    fs::create_directories(dir);
    const std::string model = (dir / "model.json").string();
    if (run_cli("train --components DQN_DE_MS --split easy-train --dim 10 --max-episodes 12 --max-steps 40 --seed 7 "
                "--out \"" + model + "\"") != 0 ||
        run_cli("test --components DQN_DE_MS --model \"" + model + "\" --dims 10 --replications 3 --max-steps 40 "
                "--seed 7 --threads 2 --format csv,latex,traces --report-dir \"" + (dir / "report").string() + "\"") != 0) {
      return {false, "CLI run failed"};
    }
  }
  std::size_t files = 0, differing = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path twin = root / "b" / fs::relative(e.path(), root / "a");
    ++files;
    if (!fs::exists(twin) || slurp(e.path()) != slurp(twin)) ++differing;
  }
  fs::remove_all(root);
  return {files > 50 && differing == 0,
          std::to_string(files) + " files compared, " + std::to_string(differing) + " differ"};
}

// --- AC10 --------------------------------------------------------------------

Outcome report_fidelity() {
  harness::TestReport rep;
  rep.components = "DQN_DE_MS";
  rep.baseline = "DE";
  rep.dims = {10};
  rep.replications = 2;
  const double m = 1.6059e-1, s = 4.79e-2;
  const std::vector<metrics::Mark> marks = {metrics::Mark::better, metrics::Mark::worse, metrics::Mark::equal,
                                            metrics::Mark::better, metrics::Mark::better};
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const int fid = static_cast<int>(i) + 1;
    const auto mem = i == 0 ? metrics::Membership::unseen : metrics::Membership::seen;
    rep.algorithm.add_row(fid, 10, mem, {m + s / std::sqrt(2.0), m - s / std::sqrt(2.0)});
    rep.baseline_table.add_row(fid, 10, mem, {1.0, 2.0});
    rep.comparisons.push_back({fid, 10, mem, {marks[i], 0.01}});
  }
  const std::string tex = harness::report_latex(rep, 10);
  const bool cell = tex.find("BBOB\\_F1 & 1.6059e-1 (4.79e-2) + & ") != std::string::npos;

  std::istringstream in(tex);
  std::string line, footer;
  std::size_t plus = 0, minus = 0, eq = 0;
  while (std::getline(in, line)) {
    if (line.rfind("BBOB\\_F", 0) == 0) {
      const auto pos = line.find(") ", line.find(" & ")) + 2;
      plus += line[pos] == '+';
      minus += line[pos] == '-';
      eq += line[pos] == '=';
    } else if (line.rfind("+/-/=", 0) == 0) {
      footer = line;
    }
  }
  const std::string expected =
      "+/-/= & " + std::to_string(plus) + "/" + std::to_string(minus) + "/" + std::to_string(eq) + " &  \\\\";
  const bool counts = footer == expected && plus == 3 && minus == 1 && eq == 1;
  return {cell && counts, std::string("cell format ") + (cell ? "matches" : "MISMATCH") + ", footer '" + footer + "'"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", "BBOB correctness", bbob_correctness},
      {"AC2", "baseline DE sanity on F1 D10", baseline_sanity},
      {"AC3", "gradient finite-difference oracle", gradient_oracle},
      {"AC4", "Wilcoxon exact vs enumeration", wilcoxon_oracle},
      {"AC5", "metric golden values", metric_golden},
      {"AC6", "hypervolume vs Monte Carlo", hv_cross_check},
      {"AC7", "desk-scale DQN_DE_MS efficacy", training_efficacy},
      {"AC8", "DE_DE_FCR elitism", meta_de_elitism},
      {"AC9", "end-to-end determinism", end_to_end_determinism},
      {"AC10", "report fidelity", report_fidelity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %-4s %-36s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
