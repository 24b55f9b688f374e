#pragma once

// Helpers shared by the MARL and shared-network trainers.

#include <span>
#include <vector>

#include "dtvec/marl.hpp"

namespace dtvec::detail {

inline Eigen::VectorXd joint_features(std::span<const AgentObservation> obs,
                                      const ScenarioConfig& config) {
  const int dim = observation_size(config.k_tasks);
  Eigen::VectorXd out(dim * static_cast<Eigen::Index>(obs.size()));
  for (std::size_t n = 0; n < obs.size(); ++n) {
    out.segment(static_cast<Eigen::Index>(n) * dim, dim) = agent_features(obs[n], config);
  }
  return out;
}

template <typename S>
struct Batch {
  Mat<S> states;
  Mat<S> actions;
  Mat<S> rewards;  // one row per agent
  Mat<S> next_states;
};

template <typename S>
Batch<S> make_batch(const ReplayBuffer& buffer, const std::vector<std::size_t>& indices) {
  const auto& first = buffer.at(indices.front());
  const Eigen::Index b = static_cast<Eigen::Index>(indices.size());
  Batch<S> out;
  out.states.resize(first.joint_state.size(), b);
  out.actions.resize(first.joint_action.size(), b);
  out.rewards.resize(first.rewards.size(), b);
  out.next_states.resize(first.next_joint_state.size(), b);
  for (Eigen::Index j = 0; j < b; ++j) {
    const auto& e = buffer.at(indices[static_cast<std::size_t>(j)]);
    out.states.col(j) = e.joint_state.cast<S>();
    out.actions.col(j) = e.joint_action.cast<S>();
    out.rewards.col(j) = e.rewards.cast<S>();
    out.next_states.col(j) = e.next_joint_state.cast<S>();
  }
  return out;
}

// Running sums for one episode's metrics.
struct EpisodeAccumulator {
  std::vector<double> reward_sum;
  double delay_sum = 0.0;
  long delay_count = 0;
  int violations = 0;
  double allocated_ghz_sum = 0.0;
  long steps = 0;
  double critic_loss_sum = 0.0;
  double actor_loss_sum = 0.0;
  long updates = 0;

  explicit EpisodeAccumulator(int n_agents) : reward_sum(n_agents, 0.0) {}

  void add_step(const StepResult& sr) {
    for (std::size_t n = 0; n < sr.rewards.size(); ++n) reward_sum[n] += sr.rewards[n];
    for (const auto& v : sr.outcome.vehicles) {
      delay_sum += v.total_delay_s;
      ++delay_count;
      violations += v.deadline_violations;
    }
    allocated_ghz_sum += sr.outcome.allocated_hz / kGiga;
    ++steps;
  }

  void add_update(double critic_loss, double actor_loss) {
    critic_loss_sum += critic_loss;
    actor_loss_sum += actor_loss;
    ++updates;
  }

  EpisodeMetrics finish(int episode) const {
    EpisodeMetrics m;
    m.episode = episode;
    double total = 0.0;
    for (double r : reward_sum) {
      m.mean_reward_per_agent.push_back(steps ? r / static_cast<double>(steps) : 0.0);
      total += m.mean_reward_per_agent.back();
    }
    m.mean_reward = reward_sum.empty() ? 0.0 : total / static_cast<double>(reward_sum.size());
    m.critic_loss = updates ? critic_loss_sum / static_cast<double>(updates) : 0.0;
    m.actor_loss = updates ? actor_loss_sum / static_cast<double>(updates) : 0.0;
    m.mean_total_delay = delay_count ? delay_sum / static_cast<double>(delay_count) : 0.0;
    m.violations = violations;
    m.resource_usage_ghz = steps ? allocated_ghz_sum / static_cast<double>(steps) : 0.0;
    return m;
  }
};

}  // namespace dtvec::detail
