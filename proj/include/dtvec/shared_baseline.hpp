#pragma once

#include <string>
#include <vector>

#include "dtvec/marl.hpp"

namespace dtvec {

// Single actor-critic shared by every vehicle. The critic sees only the
// acting agent's local state and action. Within an episode the first slot
// lets every agent act; afterwards exactly one agent (round-robin) refreshes
// its action per slot while the others replay their previous action.
struct SharedModel {
  ScenarioConfig scenario;
  TrainConfig train;
  AgentNets<TrainScalar> nets;
};

struct SharedTrainResult {
  SharedModel model;
  std::vector<EpisodeMetrics> history;
  std::string rng_state;
};

// Index of the agent that refreshes its action at `step` (step >= 1).
inline int acting_agent(int step, int n_agents) { return (step - 1) % n_agents; }

// Same machinery as train(): replay buffer, TD critic update, actor update,
// soft target updates. Only the acting agents' transitions are stored and one
// update runs per slot.
SharedTrainResult shared_baseline_train(VecEnvironment& env, const TrainConfig& cfg,
                                        const EpisodeCallback& on_episode = {});

// Evaluation view of the shared scheme (deterministic actor, stale actions).
Policy shared_policy(const SharedModel& model);

}  // namespace dtvec
