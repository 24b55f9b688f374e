#include "dtvec/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "dtvec/config_io.hpp"

namespace dtvec {

using json = nlohmann::json;

namespace {

json net_to_json(const Mlp<TrainScalar>& net) {
  json j;
  j["sizes"] = net.sizes();
  std::vector<std::string> acts;
  for (auto a : net.activations()) acts.push_back(to_string(a));
  j["activations"] = acts;
  j["params"] = std::vector<TrainScalar>(net.params().data(), net.params().data() + net.num_params());
  return j;
}

Mlp<TrainScalar> net_from_json(const json& j) {
  std::vector<Activation> acts;
  for (const auto& a : j.at("activations")) acts.push_back(parse_activation(a.get<std::string>()));
  Mlp<TrainScalar> net(j.at("sizes").get<std::vector<int>>(), acts);
  auto params = j.at("params").get<std::vector<TrainScalar>>();
  if (static_cast<Eigen::Index>(params.size()) != net.num_params()) {
    throw std::runtime_error("checkpoint: parameter count does not match network shape");
  }
  net.params() = Eigen::Map<const Vec<TrainScalar>>(params.data(), net.num_params());
  return net;
}

json nets_to_json(const AgentNets<TrainScalar>& a) {
  return {{"actor", net_to_json(a.actor)},
          {"target_actor", net_to_json(a.target_actor)},
          {"critic", net_to_json(a.critic)},
          {"target_critic", net_to_json(a.target_critic)}};
}

AgentNets<TrainScalar> nets_from_json(const json& j, const TrainConfig& cfg) {
  AgentNets<TrainScalar> a;
  a.actor = net_from_json(j.at("actor"));
  a.target_actor = net_from_json(j.at("target_actor"));
  a.critic = net_from_json(j.at("critic"));
  a.target_critic = net_from_json(j.at("target_critic"));
  a.actor_opt = Optimizer<TrainScalar>(cfg.optimizer, cfg.actor_lr, a.actor.num_params());
  a.critic_opt = Optimizer<TrainScalar>(cfg.optimizer, cfg.critic_lr, a.critic.num_params());
  return a;
}

json header(const std::string& algorithm, const ScenarioConfig& sc, const TrainConfig& tc,
            const std::string& rng_state) {
  return {{"format", "dtvec-checkpoint"},
          {"version", kCheckpointVersion},
          {"algorithm", algorithm},
          {"config", to_ini(RunConfig{sc, tc})},
          {"rng_state", rng_state}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path.string() + "'");
  out << j.dump();
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const MarlModel& model,
                     const std::string& rng_state) {
  json j = header("marl", model.scenario, model.train, rng_state);
  j["agents"] = json::array();
  for (const auto& a : model.agents) j["agents"].push_back(nets_to_json(a));
  write_json(path, j);
}

void save_checkpoint(const std::filesystem::path& path, const SharedModel& model,
                     const std::string& rng_state) {
  json j = header("shared", model.scenario, model.train, rng_state);
  j["shared"] = nets_to_json(model.nets);
  write_json(path, j);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("checkpoint '" + path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "dtvec-checkpoint") {
      throw std::runtime_error("not a dtvec checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    }
    RunConfig rc = parse_ini(j.at("config").get<std::string>());
    LoadedCheckpoint out;
    out.algorithm = j.at("algorithm").get<std::string>();
    out.rng_state = j.at("rng_state").get<std::string>();
    if (out.algorithm == "marl") {
      MarlModel m{rc.scenario, rc.train, {}};
      for (const auto& a : j.at("agents")) m.agents.push_back(nets_from_json(a, rc.train));
      if (static_cast<int>(m.agents.size()) != rc.scenario.n_vehicles) {
        throw std::runtime_error("agent count does not match n_vehicles");
      }
      out.marl = std::move(m);
    } else if (out.algorithm == "shared") {
      out.shared = SharedModel{rc.scenario, rc.train, nets_from_json(j.at("shared"), rc.train)};
    } else {
      throw std::runtime_error("unknown algorithm '" + out.algorithm + "'");
    }
    return out;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed checkpoint '" + path.string() + "': " + e.what());
  }
}

}  // namespace dtvec
