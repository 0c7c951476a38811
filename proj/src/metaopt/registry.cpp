#include "metabbo/error.hpp"
#include "metabbo/metaopt.hpp"

namespace metabbo::metaopt {

namespace {

struct Entry {
  const char* name;
  AgentKind kind;
};

constexpr Entry kRegistry[] = {
    {"DQN_DE_MS", AgentKind::dqn_de_ms},
    {"DDPG_DE_F", AgentKind::ddpg_de_f},
    {"DE_DE_FCR", AgentKind::de_de_fcr},
};

}  // namespace

AgentKind parse_components(const std::string& name) {
  for (const Entry& e : kRegistry) {
    if (name == e.name) return e.kind;
  }
  throw Error(Errc::registry, "unknown components '" + name + "'");
}

std::string components_name(AgentKind kind) {
  for (const Entry& e : kRegistry) {
    if (e.kind == kind) return e.name;
  }
  throw Error(Errc::registry, "unregistered agent kind");
}

std::vector<std::string> registered_components() {
  std::vector<std::string> out;
  for (const Entry& e : kRegistry) out.emplace_back(e.name);
  return out;
}

std::unique_ptr<MetaOptimizer> make_agent(AgentKind kind, const AgentOptions& options) {
  switch (kind) {
    case AgentKind::dqn_de_ms: return std::make_unique<DqnAgent>(options.dqn, options.seed);
    case AgentKind::ddpg_de_f: return std::make_unique<DdpgAgent>(options.ddpg, options.seed);
    case AgentKind::de_de_fcr: return std::make_unique<DeMetaAgent>(options.de_meta, options.seed);
  }
  throw Error(Errc::registry, "unregistered agent kind");
}

std::unique_ptr<MetaOptimizer> agent_from_json(AgentKind kind, const nlohmann::json& j) {
  switch (kind) {
    case AgentKind::dqn_de_ms: return DqnAgent::from_json(j);
    case AgentKind::ddpg_de_f: return DdpgAgent::from_json(j);
    case AgentKind::de_de_fcr: return DeMetaAgent::from_json(j);
  }
  throw Error(Errc::registry, "unregistered agent kind");
}

nlohmann::json net_to_json(const approximator::DenseNet& net) {
  std::vector<std::string> acts;
  for (auto a : net.activations()) acts.emplace_back(approximator::to_string(a));
  const auto p = net.parameters();
  return {{"layer_sizes", net.layer_sizes()}, {"activations", acts}, {"parameters", std::vector<double>(p.begin(), p.end())}};
}

approximator::DenseNet net_from_json(const nlohmann::json& j) {
  std::vector<approximator::Activation> acts;
  for (const auto& a : j.at("activations")) acts.push_back(approximator::parse_activation(a.get<std::string>()));
  approximator::DenseNet net(j.at("layer_sizes").get<std::vector<std::size_t>>(), std::move(acts));
  const auto params = j.at("parameters").get<std::vector<double>>();
  if (params.size() != net.num_parameters()) throw Error(Errc::parse, "parameter count does not match layer sizes");
  std::copy(params.begin(), params.end(), net.parameters().begin());
  if (!net.all_finite()) throw Error(Errc::parse, "non-finite network parameter");
  return net;
}

nlohmann::json adam_to_json(const approximator::AdamState& s) {
  return {{"lr", s.config.lr},
          {"beta1", s.config.beta1},
          {"beta2", s.config.beta2},
          {"epsilon", s.config.epsilon},
          {"t", s.t},
          {"first_moment", s.first_moment},
          {"second_moment", s.second_moment}};
}

approximator::AdamState adam_from_json(const nlohmann::json& j) {
  approximator::AdamState s;
  s.config = {j.at("lr").get<double>(), j.at("beta1").get<double>(), j.at("beta2").get<double>(),
              j.at("epsilon").get<double>()};
  s.t = j.at("t").get<std::uint64_t>();
  s.first_moment = j.at("first_moment").get<Vector>();
  s.second_moment = j.at("second_moment").get<Vector>();
  if (s.first_moment.size() != s.second_moment.size()) throw Error(Errc::parse, "adam moment shapes differ");
  return s;
}

}  // namespace metabbo::metaopt
