#include <algorithm>

#include "metabbo/metaopt.hpp"
#include "test_util.hpp"

using namespace metabbo;
using namespace metabbo::metaopt;

namespace {

Observation random_obs(Rng& rng) {
  Observation o{};
  for (auto& v : o) v = rng.uniform(-1, 2);
  return o;
}

void zero(approximator::DenseNet& net) {
  for (double& p : net.parameters()) p = 0.0;
}

Transition make_transition(Rng& rng, Action a) {
  Transition t;
  t.observation = random_obs(rng);
  t.next_observation = random_obs(rng);
  t.action = std::move(a);
  t.reward = rng.uniform();
  t.done = rng.uniform() < 0.2;
  return t;
}

}  // namespace

TEST_CASE("specs and decoding") {
  CHECK(std::get<DiscreteActions>(AgentSpec::for_kind(AgentKind::dqn_de_ms).actions).count == 4);
  CHECK(std::get<ContinuousActions>(AgentSpec::for_kind(AgentKind::ddpg_de_f).actions) ==
        ContinuousActions{1, 0.05, 0.95});
  CHECK(std::get<ContinuousActions>(AgentSpec::for_kind(AgentKind::de_de_fcr).actions) ==
        ContinuousActions{2, 0.0, 1.0});

  const auto c3 = decode_action(AgentKind::dqn_de_ms, std::size_t{3});
  CHECK(c3 == baseopt::BaseControl{0.5, 0.9, baseopt::Strategy::rand_2});
  CHECK(decode_action(AgentKind::ddpg_de_f, std::vector<double>{0.3}) ==
        baseopt::BaseControl{0.3, 0.9, baseopt::Strategy::rand_1});
  CHECK(decode_action(AgentKind::de_de_fcr, std::vector<double>{0.2, 0.4}) ==
        baseopt::BaseControl{0.2, 0.4, baseopt::Strategy::rand_1});
  CHECK_ERRC(decode_action(AgentKind::dqn_de_ms, std::size_t{4}), Errc::invalid_action);
  CHECK_ERRC(decode_action(AgentKind::dqn_de_ms, std::vector<double>{0.3}), Errc::invalid_action);
  CHECK_ERRC(decode_action(AgentKind::ddpg_de_f, std::vector<double>{0.99}), Errc::invalid_action);
  CHECK_ERRC(decode_action(AgentKind::de_de_fcr, std::vector<double>{0.5}), Errc::invalid_action);
}

TEST_CASE("registry") {
  CHECK(parse_components("DQN_DE_MS") == AgentKind::dqn_de_ms);
  CHECK(parse_components("DDPG_DE_F") == AgentKind::ddpg_de_f);
  CHECK(parse_components("DE_DE_FCR") == AgentKind::de_de_fcr);
  CHECK_ERRC(parse_components("PPO_DE_F"), Errc::registry);
  CHECK(registered_components().size() == 3);
  for (const auto& name : registered_components()) CHECK(components_name(parse_components(name)) == name);
}

TEST_CASE("replay buffer") {
  ReplayBuffer buf(3);
  Rng rng(1);
  CHECK_ERRC(buf.sample(1, rng), Errc::insufficient_data);
  for (int i = 0; i < 5; ++i) {
    Transition t;
    t.reward = i;
    t.action = std::size_t{0};
    buf.push(t);
    CHECK(buf.size() <= buf.capacity());
  }
  CHECK(buf.size() == 3);
  for (const Transition* t : buf.sample(3, rng)) CHECK(t->reward >= 2.0);
  buf.clear();
  CHECK(buf.size() == 0);
}

TEST_CASE("action legality over random observations") {
  AgentOptions opts;
  opts.seed = 4;
  for (AgentKind kind : {AgentKind::dqn_de_ms, AgentKind::ddpg_de_f, AgentKind::de_de_fcr}) {
    auto agent = make_agent(kind, opts);
    CHECK(agent->kind() == kind);
    Rng rng(10);
    bool ok = true;
    for (int k = 0; k < 10000; ++k) {
      const Observation o = random_obs(rng);
      try {
        decode_action(kind, agent->get_action(o)).validate();
        decode_action(kind, agent->get_action_with_exploration(o, rng)).validate();
      } catch (const Error&) {
        ok = false;
      }
    }
    CHECK(ok);
    CHECK_ERRC(agent->get_action(std::vector<double>(3, 0.0)), Errc::dimension_mismatch);
  }
}

TEST_CASE("get_action is a pure function of parameters and observation") {
  AgentOptions opts;
  opts.seed = 6;
  for (AgentKind kind : {AgentKind::dqn_de_ms, AgentKind::ddpg_de_f}) {
    auto a = make_agent(kind, opts);
    auto b = make_agent(kind, opts);
    Rng rng(2);
    for (int k = 0; k < 100; ++k) {
      const Observation o = random_obs(rng);
      const Action first = a->get_action(o);
      a->get_action_with_exploration(o, rng);
      CHECK(first == a->get_action(o));
      CHECK(first == b->get_action(o));
    }
  }
}

TEST_CASE("DQN tie-break and exploration") {
  DqnAgent agent(DqnConfig{}, 1);
  zero(agent.online());
  Rng rng(3);
  const Observation o = random_obs(rng);
  CHECK(std::get<std::size_t>(agent.get_action(o)) == 0);

  DqnConfig greedy;
  greedy.epsilon_start = greedy.epsilon_end = 0.0;
  DqnAgent g(greedy, 2);
  for (int k = 0; k < 50; ++k) {
    const Observation x = random_obs(rng);
    CHECK(g.get_action_with_exploration(x, rng) == g.get_action(x));
  }

  DqnConfig random;
  random.epsilon_start = random.epsilon_end = 1.0;
  DqnAgent r(random, 2);
  std::array<int, 4> hist{};
  for (int k = 0; k < 4000; ++k) ++hist[std::get<std::size_t>(r.get_action_with_exploration(o, rng))];
  for (int h : hist) CHECK(std::abs(h - 1000) < 150);
}

TEST_CASE("DQN epsilon schedule and reset") {
  DqnAgent agent(DqnConfig{}, 1);
  agent.set_training_horizon(100);
  Rng rng(1);
  const Observation o = random_obs(rng);
  CHECK(agent.epsilon() == 1.0);
  for (int k = 0; k < 25; ++k) agent.get_action_with_exploration(o, rng);
  CHECK(agent.epsilon() == doctest::Approx(1.0 - 0.5 * 0.95));
  for (int k = 0; k < 100; ++k) agent.get_action_with_exploration(o, rng);
  CHECK(agent.epsilon() == 0.05);

  for (int k = 0; k < 10; ++k) agent.observe(make_transition(rng, std::size_t{1}));
  const auto before = agent.online();
  agent.reset();
  CHECK(agent.replay().size() == 0);
  CHECK(agent.epsilon() == 1.0);
  CHECK(agent.online() == before);
}

TEST_CASE("DQN fixed point on zero TD error") {
  DqnConfig cfg;
  cfg.batch_size = 4;
  DqnAgent agent(cfg, 1);
  zero(agent.online());
  zero(agent.target_mutable());
  Rng rng(5);
  for (int k = 0; k < 4; ++k) {
    Transition t = make_transition(rng, std::size_t{static_cast<std::size_t>(k)});
    t.reward = 0;
    t.done = true;
    agent.observe(t);
  }
  const auto before = agent.online();
  CHECK(agent.learn(rng) == LearnStatus::updated);
  CHECK(agent.online() == before);
}

TEST_CASE("DQN learn waits for a full batch") {
  DqnConfig cfg;
  cfg.batch_size = 8;
  DqnAgent agent(cfg, 1);
  Rng rng(5);
  for (int k = 0; k < 7; ++k) agent.observe(make_transition(rng, std::size_t{0}));
  CHECK(agent.learn(rng) == LearnStatus::not_ready);
  agent.observe(make_transition(rng, std::size_t{0}));
  CHECK(agent.learn(rng) == LearnStatus::updated);
}

TEST_CASE("DQN single transition TD step on a one-hidden-unit net") {
  DqnConfig cfg;
  cfg.hidden = {1};
  cfg.batch_size = 1;
  cfg.gamma = 0.9;
  DqnAgent agent(cfg, 1);
  auto& net = agent.online();
  zero(net);
  Observation s{};
  Observation s2{};
  for (std::size_t i = 0; i < 8; ++i) {
    s[i] = 0.1 * static_cast<double>(i + 1);
    s2[i] = 0.05 * static_cast<double>(i);
    net.weight(0, 0, i) = 0.2;
  }
  net.bias(0, 0) = 0.1;
  const double w2[4] = {0.5, -0.3, 0.8, 0.1};
  for (std::size_t a = 0; a < 4; ++a) {
    net.weight(1, a, 0) = w2[a];
    net.bias(1, a) = 0.01 * static_cast<double>(a);
  }
  agent.target_mutable() = net;

  const std::size_t action = 1;
  const double reward = 0.7;
  // hand forward pass
  double h = 0.1, h2 = 0.1;
  for (std::size_t i = 0; i < 8; ++i) {
    h += 0.2 * s[i];
    h2 += 0.2 * s2[i];
  }
  const double q = w2[action] * h + 0.01;
  double max_next = -1e300;
  for (std::size_t a = 0; a < 4; ++a) max_next = std::max(max_next, w2[a] * h2 + 0.01 * static_cast<double>(a));
  const double y = reward + 0.9 * max_next;
  const double g = 2.0 * (q - y);  // d(Q - y)^2 / dQ
  CHECK(q == doctest::Approx(agent.q_values(s)[action]).epsilon(1e-14));

  Transition t;
  t.observation = s;
  t.next_observation = s2;
  t.action = action;
  t.reward = reward;
  t.done = false;
  agent.observe(t);
  Rng rng(1);
  REQUIRE(agent.learn(rng) == LearnStatus::updated);

  // first Adam step moves each parameter by -lr * g / (|g| + eps)
  auto step = [](double grad) { return grad == 0.0 ? 0.0 : -1e-3 * grad / (std::abs(grad) + 1e-8); };
  auto& after = agent.online();
  for (std::size_t i = 0; i < 8; ++i) CHECK(after.weight(0, 0, i) == doctest::Approx(0.2 + step(g * w2[action] * s[i])));
  CHECK(after.bias(0, 0) == doctest::Approx(0.1 + step(g * w2[action])));
  for (std::size_t a = 0; a < 4; ++a) {
    const double ga = a == action ? g * h : 0.0;
    CHECK(after.weight(1, a, 0) == doctest::Approx(w2[a] + step(ga)).epsilon(1e-12));
    CHECK(after.bias(1, a) == doctest::Approx(0.01 * static_cast<double>(a) + step(a == action ? g : 0.0)));
  }
  // Q(s, a) moved toward the TD target
  CHECK(std::abs(agent.q_values(s)[action] - y) < std::abs(q - y));
}

TEST_CASE("DQN target network only changes at sync points") {
  DqnConfig cfg;
  cfg.hidden = {8};
  cfg.batch_size = 4;
  cfg.target_sync_interval = 5;
  DqnAgent agent(cfg, 3);
  Rng rng(8);
  for (int k = 0; k < 20; ++k) agent.observe(make_transition(rng, std::size_t{rng.index(4)}));
  auto target = agent.target();
  for (int call = 1; call <= 12; ++call) {
    agent.learn(rng);
    if (call % 5 == 0) {
      CHECK(agent.target() == agent.online());
      target = agent.target();
    } else {
      CHECK(agent.target() == target);
    }
  }
}

TEST_CASE("DDPG squash, noise and soft updates") {
  DdpgConfig cfg;
  cfg.hidden = {16, 16};
  cfg.batch_size = 8;
  DdpgAgent agent(cfg, 4);
  CHECK(agent.squash(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  zero(agent.actor());
  Rng rng(2);
  const Observation o = random_obs(rng);
  CHECK(std::get<std::vector<double>>(agent.get_action(o))[0] == doctest::Approx(0.5));

  DdpgConfig quiet = cfg;
  quiet.sigma = 0.0;
  DdpgAgent q(quiet, 4);
  for (int k = 0; k < 20; ++k) {
    const Observation x = random_obs(rng);
    CHECK(q.get_action_with_exploration(x, rng) == q.get_action(x));
  }

  DdpgAgent learner(cfg, 5);
  for (int k = 0; k < 20; ++k) learner.observe(make_transition(rng, std::vector<double>{rng.uniform(0.05, 0.95)}));
  const auto actor_t = learner.actor_target();
  const auto critic_t = learner.critic_target();
  REQUIRE(learner.learn(rng) == LearnStatus::updated);
  const auto expect = [&](const approximator::DenseNet& old_t, const approximator::DenseNet& online,
                          const approximator::DenseNet& new_t) {
    bool exact = true;
    for (std::size_t i = 0; i < old_t.num_parameters(); ++i) {
      exact = exact && new_t.parameters()[i] == (1.0 - 0.005) * old_t.parameters()[i] + 0.005 * online.parameters()[i];
    }
    return exact;
  };
  CHECK(expect(actor_t, learner.actor(), learner.actor_target()));
  CHECK(expect(critic_t, learner.critic(), learner.critic_target()));
  CHECK(learner.actor().all_finite());
  CHECK(learner.critic().all_finite());
  learner.reset();
  CHECK(learner.replay().size() == 0);
}

TEST_CASE("DE_DE_FCR seeding and elitism") {
  DeMetaConfig cfg;
  cfg.population_size = 6;
  cfg.episodes_per_candidate = 1;
  DeMetaAgent agent(cfg, 9);
  CHECK(agent.best_candidate() == DeMetaAgent::Candidate{0.5, 0.9});
  Rng rng(1);
  const Observation o{};
  CHECK(agent.get_action(o) == Action{std::vector<double>{0.5, 0.9}});
  for (const auto& c : agent.candidates()) {
    CHECK(c[0] >= 0.0);
    CHECK(c[0] <= 1.0);
    CHECK(c[1] >= 0.0);
    CHECK(c[1] <= 1.0);
  }
  CHECK_ERRC(DeMetaAgent(DeMetaConfig{3, 1, 0.5, 0.9}, 1), Errc::population_too_small);

  // fitness by position: best is the arg max
  const double initial[] = {1, 2, 3, 0.5, 0.1, 2.5};
  for (double f : initial) agent.record_fitness(f, rng);
  CHECK(agent.best_meta_fitness() == 3.0);
  CHECK(agent.best_candidate() == agent.candidates()[2]);
  const auto champion = agent.best_candidate();
  CHECK(agent.best_history() == std::vector<double>{3.0});

  // a generation of trials that never beat the champion keeps it
  for (int k = 0; k < 6; ++k) agent.record_fitness(2.9, rng);
  CHECK(agent.best_candidate() == champion);
  CHECK(agent.meta_generation() == 1);

  double prev = agent.best_meta_fitness();
  for (int gen = 0; gen < 10; ++gen) {
    for (int k = 0; k < 6; ++k) {
      const Observation x{};
      const auto a = std::get<std::vector<double>>(agent.get_action_with_exploration(x, rng));
      CHECK(a[0] >= 0.0);
      CHECK(a[1] <= 1.0);
      agent.record_fitness(-std::abs(a[0] - 0.3) - std::abs(a[1] - 0.6) + 3.0, rng);
    }
    CHECK(agent.best_meta_fitness() >= prev);
    prev = agent.best_meta_fitness();
  }
  const auto& hist = agent.best_history();
  CHECK(hist.size() == 12);
  for (std::size_t i = 1; i < hist.size(); ++i) CHECK(hist[i] >= hist[i - 1]);
  CHECK_ERRC(agent.record_fitness(std::nan(""), rng), Errc::numeric);
}

TEST_CASE("DE_DE_FCR averages episode outcomes") {
  DeMetaConfig cfg;
  cfg.population_size = 4;
  cfg.episodes_per_candidate = 2;
  DeMetaAgent agent(cfg, 1);
  Rng rng(1);
  agent.end_episode({10.0, 5.0, 0, 1});
  CHECK(agent.learn(rng) == LearnStatus::not_ready);
  agent.end_episode({4.0, 1.0, 0, 1});
  CHECK(agent.learn(rng) == LearnStatus::updated);
  CHECK(agent.meta_fitness()[0] == doctest::Approx(-(0.5 + 0.25) / 2));
}

TEST_CASE("serialization round trip keeps actions") {
  AgentOptions opts;
  opts.seed = 12;
  opts.dqn.batch_size = 4;
  opts.ddpg.batch_size = 4;
  for (AgentKind kind : {AgentKind::dqn_de_ms, AgentKind::ddpg_de_f, AgentKind::de_de_fcr}) {
    auto agent = make_agent(kind, opts);
    Rng rng(3);
    for (int k = 0; k < 8; ++k) {
      const Observation o = random_obs(rng);
      Action a = agent->get_action_with_exploration(o, rng);
      Transition t = make_transition(rng, a);
      agent->observe(t);
      agent->end_episode({1.0, 0.5, 0.0, 1});
      agent->learn(rng);
    }
    const auto restored = agent_from_json(kind, nlohmann::json::parse(agent->to_json().dump()));
    for (int k = 0; k < 100; ++k) {
      const Observation o = random_obs(rng);
      CHECK(restored->get_action(o) == agent->get_action(o));
    }
    CHECK(restored->to_json() == agent->to_json());
    CHECK(agent->clone()->to_json() == agent->to_json());
  }
}
