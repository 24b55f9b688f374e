#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dtvec/env.hpp"

namespace dtvec {

// Maps the slot's joint observation to a projected joint action. `step` is
// the slot index within the current episode (0 right after reset).
using Policy =
    std::function<JointAction(const std::vector<AgentObservation>& observations, int step, Rng& rng)>;

// omega = 0, f = f_alloc_min for every task.
JointAction policy_all_local(const ScenarioConfig& config);

// omega = 1, f = F_server / (N K) clamped to the allocation bounds.
JointAction policy_full_offload_equal_split(const ScenarioConfig& config);

// Uniform raw actions pushed through project_action.
JointAction policy_random(const ScenarioConfig& config,
                          const std::vector<AgentObservation>& observations, Rng& rng);

Policy all_local_policy(const ScenarioConfig& config);
Policy equal_split_policy(const ScenarioConfig& config);
Policy random_policy(const ScenarioConfig& config);

struct EvalResult {
  double mean_reward = 0.0;          // over agents and slots
  double mean_total_delay = 0.0;     // over vehicles and slots
  double resource_usage_ghz = 0.0;   // mean per-slot sum of allocations
  double violations_per_slot = 0.0;
  std::vector<double> episode_rewards;  // mean reward of each episode
};

// Runs `episodes` fresh episodes; episode e resets with derive_seed(seed, e).
// The policy's rng is seeded from derive_seed(seed, 1 << 20).
EvalResult evaluate(const ScenarioConfig& config, const Policy& policy, int episodes,
                    int steps_per_episode, std::uint64_t seed);

}  // namespace dtvec
