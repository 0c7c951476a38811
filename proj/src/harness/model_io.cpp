#include <fstream>
#include <sstream>

#include "metabbo/error.hpp"
#include "metabbo/harness.hpp"

namespace metabbo::harness {

namespace {

constexpr const char* kFormatTag = "metabbo-model";

nlohmann::json spec_to_json(const metaopt::AgentSpec& spec) {
  nlohmann::json actions;
  if (const auto* d = std::get_if<metaopt::DiscreteActions>(&spec.actions)) {
    actions = {{"type", "discrete"}, {"count", d->count}};
  } else {
    const auto& c = std::get<metaopt::ContinuousActions>(spec.actions);
    actions = {{"type", "continuous"}, {"dim", c.dim}, {"low", c.low}, {"high", c.high}};
  }
  return {{"kind", metaopt::to_string(spec.kind)}, {"observation_length", spec.observation_length}, {"actions", actions}};
}

}  // namespace

std::string model_to_string(const AgentModel& model) {
  if (!model.agent) throw Error(Errc::configuration, "model has no agent");
  nlohmann::json j = {
      {"format", kFormatTag},
      {"format_version", model.format_version},
      {"components", model.components},
      {"spec", spec_to_json(model.spec)},
      {"config_hash", model.config_hash},
      {"episodes", model.episodes},
      {"train_dims", model.train_dims},
      {"seen", model.seen},
      {"agent", model.agent->to_json()},
  };
  return j.dump(1) + "\n";
}

AgentModel model_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", std::string{}) != kFormatTag) {
      throw Error(Errc::parse, "not a metabbo model file");
    }
    AgentModel model;
    model.format_version = j.at("format_version").get<int>();
    if (model.format_version != kModelFormatVersion) {
      throw Error(Errc::incompatible_model, "model format version " + std::to_string(model.format_version) +
                                                " is not supported (expected " +
                                                std::to_string(kModelFormatVersion) + ")");
    }
    model.components = j.at("components").get<std::string>();
    const metaopt::AgentKind kind = metaopt::parse_components(model.components);
    model.spec = metaopt::AgentSpec::for_kind(kind);
    if (j.at("spec") != spec_to_json(model.spec)) {
      throw Error(Errc::incompatible_model, "stored agent spec does not match " + model.components);
    }
    model.config_hash = j.at("config_hash").get<std::string>();
    model.episodes = j.at("episodes").get<std::size_t>();
    model.train_dims = j.at("train_dims").get<std::vector<int>>();
    model.seen = j.at("seen").get<std::vector<int>>();
    model.agent = metaopt::agent_from_json(kind, j.at("agent"));
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, std::string("malformed model file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::registry) throw Error(Errc::incompatible_model, e.what());
    throw;
  }
}

void save_model(const AgentModel& model, const std::filesystem::path& path) {
  const std::string text = model_to_string(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(Errc::io, "failed writing " + path.string());
}

AgentModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_string(ss.str());
}

}  // namespace metabbo::harness
