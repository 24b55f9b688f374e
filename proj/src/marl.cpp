#include "dtvec/marl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "training_common.hpp"

namespace dtvec {

Eigen::VectorXd agent_features(const AgentObservation& obs, const ScenarioConfig& config) {
  const int k = static_cast<int>(obs.tasks.size());
  Eigen::VectorXd f(observation_size(k));
  const double error_scale = std::max({std::abs(config.dt_error_range_hz.min),
                                       std::abs(config.dt_error_range_hz.max),
                                       std::abs(config.dt_error_fixed_hz), 1.0});
  for (int i = 0; i < k; ++i) {
    f(3 * i) = obs.tasks[i].size_bytes / config.task_size_range_bytes.max;
    f(3 * i + 1) = obs.tasks[i].cycles_per_byte / config.cycles_per_byte;
    f(3 * i + 2) = obs.tasks[i].deadline_s / config.deadline_s;
    f(3 * k + i) = obs.dt_error_hz[i] / error_scale;
  }
  f(4 * k) = obs.position_m.x() / config.road_length_m;
  f(4 * k + 1) = obs.position_m.y() / config.road_length_m;
  f(4 * k + 2) = std::log10(1.0 + config.tx_power_w * obs.gain / config.noise_power_w) / 10.0;
  return f;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

double exploration_std(const TrainConfig& cfg, long global_step) {
  const double total = static_cast<double>(cfg.episodes) * cfg.steps_per_episode;
  const double horizon = std::max(1.0, cfg.noise_decay_fraction * total);
  const double frac = std::min(1.0, static_cast<double>(global_step) / horizon);
  return cfg.noise_std_initial + frac * (cfg.noise_std_final - cfg.noise_std_initial);
}

TrainResult train(VecEnvironment& env, const TrainConfig& cfg, const EpisodeCallback& on_episode) {
  using S = TrainScalar;
  validate(cfg);
  const ScenarioConfig& sc = env.config();
  if (sc.n_vehicles < 1) throw std::invalid_argument("train: need at least one vehicle");
  const JointLayout layout{sc.n_vehicles, observation_size(sc.k_tasks), action_size(sc.k_tasks)};
  const int n_agents = layout.n_agents;

  Rng rng(cfg.seed);
  TrainResult result;
  result.model.scenario = sc;
  result.model.train = cfg;
  auto& agents = result.model.agents;
  for (int n = 0; n < n_agents; ++n) {
    agents.push_back(make_agent<S>(layout.obs_dim, layout.act_dim, layout.critic_input_dim(), cfg, rng));
  }
  std::vector<Rng> agent_rngs;
  for (int n = 0; n < n_agents; ++n) agent_rngs.emplace_back(derive_seed(cfg.seed, 1000 + n));

  const ActorUpdateOptions actor_opts{cfg.policy_variant, cfg.policy_std, cfg.advantage_baseline};
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity));
  long global_step = 0;

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    std::vector<AgentObservation> obs = env.reset(derive_seed(sc.seed, episode));
    Eigen::VectorXd state = detail::joint_features(obs, sc);
    detail::EpisodeAccumulator acc(n_agents);

    for (int step = 0; step < cfg.steps_per_episode; ++step, ++global_step) {
      std::vector<Eigen::VectorXd> raw(n_agents);
      const bool warm = global_step >= cfg.warmup_steps;
      const double noise = exploration_std(cfg, global_step);
      for (int n = 0; n < n_agents; ++n) {
        if (!warm) {
          raw[n] = uniform_action<double>(layout.act_dim, rng);
        } else {
          Vec<S> f = state.segment(n * layout.obs_dim, layout.obs_dim).cast<S>();
          raw[n] = act<S>(agents[n].actor, f, true, noise, rng).template cast<double>();
        }
      }
      JointAction action = project_action(raw, sc, obs);
      StepResult sr = env.step(action);
      Eigen::VectorXd next_state = detail::joint_features(sr.observations, sc);

      Experience e;
      e.joint_state = state;
      e.joint_action.resize(layout.action_dim());
      for (int n = 0; n < n_agents; ++n) e.joint_action.segment(n * layout.act_dim, layout.act_dim) = raw[n];
      e.rewards = Eigen::Map<const Eigen::VectorXd>(sr.rewards.data(), n_agents);
      e.next_joint_state = next_state;
      buffer.push(std::move(e));
      acc.add_step(sr);

      if (warm && buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
        try {
          auto batch = detail::make_batch<S>(
              buffer, buffer.sample_indices(static_cast<std::size_t>(cfg.batch_size), rng));
          // Next actions from every target actor, computed before any agent's
          // soft update in this step.
          std::vector<const Mlp<S>*> target_actors;
          for (const auto& a : agents) target_actors.push_back(&a.target_actor);
          Mat<S> next_actions = target_joint_actions<S>(target_actors, batch.next_states, layout);
          const ActorBatch<S> actor_batch{batch.states, batch.actions};
          double critic_loss = 0.0, actor_loss = 0.0;
          for (int n = 0; n < n_agents; ++n) {
            auto& a = agents[n];
            RowVec<S> rewards = static_cast<S>(cfg.reward_scale) * batch.rewards.row(n);
            RowVec<S> y = td_targets<S>(rewards, batch.next_states, next_actions, a.target_critic,
                                        sc.discount);
            critic_loss += critic_update<S>(a.critic, a.critic_opt,
                                            critic_input<S>(a.critic, batch.states, batch.actions), y);
            actor_loss += actor_update<S>(n, a.actor, a.actor_opt, a.critic, actor_batch, layout,
                                          actor_opts, agent_rngs[n]);
            soft_update<S>(a.target_critic, a.critic, cfg.soft_update_rate);
            soft_update<S>(a.target_actor, a.actor, cfg.soft_update_rate);
          }
          acc.add_update(critic_loss / n_agents, actor_loss / n_agents);
        } catch (const TrainingError& err) {
          throw TrainingError(fmt::format("episode {} step {}: {}", episode, step, err.what()));
        }
      }
      obs = std::move(sr.observations);
      state = std::move(next_state);
    }

    result.history.push_back(acc.finish(episode));
    if (on_episode) on_episode(result.history.back());
  }

  std::ostringstream os;
  os << rng;
  result.rng_state = os.str();
  return result;
}

Policy marl_policy(const MarlModel& model) {
  return [&model](const std::vector<AgentObservation>& obs, int, Rng& rng) {
    std::vector<Eigen::VectorXd> raw;
    for (std::size_t n = 0; n < obs.size(); ++n) {
      Vec<TrainScalar> f = agent_features(obs[n], model.scenario).cast<TrainScalar>();
      raw.push_back(act<TrainScalar>(model.agents[n].actor, f, false, 0.0, rng).cast<double>());
    }
    return project_action(raw, model.scenario, obs);
  };
}

}  // namespace dtvec
