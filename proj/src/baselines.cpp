#include "dtvec/baselines.hpp"

#include <algorithm>

#include "dtvec/marl.hpp"

namespace dtvec {

namespace {

JointAction uniform_joint(const ScenarioConfig& config, double ratio, double alloc_hz) {
  AgentAction a;
  a.offload_ratio.assign(config.k_tasks, ratio);
  a.dt_alloc_hz.assign(config.k_tasks, alloc_hz);
  return JointAction(config.n_vehicles, a);
}

}  // namespace

JointAction policy_all_local(const ScenarioConfig& config) {
  return uniform_joint(config, 0.0, config.f_alloc_min_hz);
}

JointAction policy_full_offload_equal_split(const ScenarioConfig& config) {
  const double tasks = static_cast<double>(std::max(1, config.n_vehicles * config.k_tasks));
  const double share = std::clamp(config.f_server_hz / tasks, config.f_alloc_min_hz, config.f_alloc_max_hz);
  return uniform_joint(config, 1.0, share);
}

JointAction policy_random(const ScenarioConfig& config,
                          const std::vector<AgentObservation>& observations, Rng& rng) {
  std::vector<Eigen::VectorXd> raw;
  for (std::size_t n = 0; n < observations.size(); ++n) {
    raw.push_back(uniform_action<double>(action_size(config.k_tasks), rng));
  }
  return project_action(raw, config, observations);
}

Policy all_local_policy(const ScenarioConfig& config) {
  return [config](const std::vector<AgentObservation>&, int, Rng&) { return policy_all_local(config); };
}

Policy equal_split_policy(const ScenarioConfig& config) {
  return [config](const std::vector<AgentObservation>&, int, Rng&) {
    return policy_full_offload_equal_split(config);
  };
}

Policy random_policy(const ScenarioConfig& config) {
  return [config](const std::vector<AgentObservation>& obs, int, Rng& rng) {
    return policy_random(config, obs, rng);
  };
}

EvalResult evaluate(const ScenarioConfig& config, const Policy& policy, int episodes,
                    int steps_per_episode, std::uint64_t seed) {
  VecEnvironment env(config);
  Rng rng(derive_seed(seed, 1u << 20));
  EvalResult out;
  double reward_sum = 0.0, delay_sum = 0.0, alloc_sum = 0.0, violations = 0.0;
  long agent_slots = 0, slots = 0;
  for (int e = 0; e < episodes; ++e) {
    std::vector<AgentObservation> obs = env.reset(derive_seed(seed, e));
    double episode_reward = 0.0;
    for (int t = 0; t < steps_per_episode; ++t) {
      StepResult sr = env.step(policy(obs, t, rng));
      for (std::size_t n = 0; n < sr.rewards.size(); ++n) {
        reward_sum += sr.rewards[n];
        episode_reward += sr.rewards[n];
        delay_sum += sr.outcome.vehicles[n].total_delay_s;
        violations += sr.outcome.vehicles[n].deadline_violations;
        ++agent_slots;
      }
      alloc_sum += sr.outcome.allocated_hz / kGiga;
      ++slots;
      obs = std::move(sr.observations);
    }
    const double denom = static_cast<double>(std::max(1, config.n_vehicles) * steps_per_episode);
    out.episode_rewards.push_back(episode_reward / denom);
  }
  if (agent_slots > 0) {
    out.mean_reward = reward_sum / static_cast<double>(agent_slots);
    out.mean_total_delay = delay_sum / static_cast<double>(agent_slots);
  }
  if (slots > 0) {
    out.resource_usage_ghz = alloc_sum / static_cast<double>(slots);
    out.violations_per_slot = violations / static_cast<double>(slots);
  }
  return out;
}

}  // namespace dtvec
