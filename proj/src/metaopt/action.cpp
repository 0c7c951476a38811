#include <cmath>
#include <string>

#include "metabbo/error.hpp"
#include "metabbo/metaopt.hpp"

namespace metabbo::metaopt {

std::string_view to_string(AgentKind kind) noexcept {
  switch (kind) {
    case AgentKind::dqn_de_ms: return "dqn_de_ms";
    case AgentKind::ddpg_de_f: return "ddpg_de_f";
    case AgentKind::de_de_fcr: return "de_de_fcr";
  }
  return "unknown";
}

AgentSpec AgentSpec::for_kind(AgentKind kind) {
  AgentSpec spec;
  spec.kind = kind;
  switch (kind) {
    case AgentKind::dqn_de_ms: spec.actions = DiscreteActions{baseopt::kStrategies.size()}; break;
    case AgentKind::ddpg_de_f: spec.actions = ContinuousActions{1, 0.05, 0.95}; break;
    case AgentKind::de_de_fcr: spec.actions = ContinuousActions{2, 0.0, 1.0}; break;
  }
  return spec;
}

baseopt::BaseControl decode_action(AgentKind kind, const Action& action) {
  const AgentSpec spec = AgentSpec::for_kind(kind);
  baseopt::BaseControl control = baseopt::kDefaultControl;
  if (const auto* discrete = std::get_if<DiscreteActions>(&spec.actions)) {
    const auto* index = std::get_if<std::size_t>(&action);
    if (index == nullptr) throw Error(Errc::invalid_action, "expected a discrete action index");
    if (*index >= discrete->count) {
      throw Error(Errc::invalid_action, "action index " + std::to_string(*index) + " out of range");
    }
    control.strategy = baseopt::kStrategies[*index];
    return control;
  }
  const auto& continuous = std::get<ContinuousActions>(spec.actions);
  const auto* values = std::get_if<std::vector<double>>(&action);
  if (values == nullptr || values->size() != continuous.dim) {
    throw Error(Errc::invalid_action, "expected a real action of length " + std::to_string(continuous.dim));
  }
  for (double v : *values) {
    if (!std::isfinite(v) || v < continuous.low || v > continuous.high) {
      throw Error(Errc::invalid_action, "action value " + std::to_string(v) + " outside bounds");
    }
  }
  control.F = (*values)[0];
  if (kind == AgentKind::de_de_fcr) control.CR = (*values)[1];
  return control;
}

void MetaOptimizer::check_observation(std::span<const double> obs) const {
  if (obs.size() != environment::kObservationLength) {
    throw Error(Errc::dimension_mismatch, "observation must have " +
                                              std::to_string(environment::kObservationLength) + " entries, got " +
                                              std::to_string(obs.size()));
  }
}

}  // namespace metabbo::metaopt
