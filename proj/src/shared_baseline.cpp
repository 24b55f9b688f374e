#include "dtvec/shared_baseline.hpp"

#include <memory>
#include <sstream>

#include <fmt/format.h>

#include "training_common.hpp"

namespace dtvec {

SharedTrainResult shared_baseline_train(VecEnvironment& env, const TrainConfig& cfg,
                                        const EpisodeCallback& on_episode) {
  using S = TrainScalar;
  validate(cfg);
  const ScenarioConfig& sc = env.config();
  if (sc.n_vehicles < 1) throw std::invalid_argument("shared_baseline_train: need at least one vehicle");
  const int n_agents = sc.n_vehicles;
  const JointLayout local{1, observation_size(sc.k_tasks), action_size(sc.k_tasks)};

  Rng rng(cfg.seed);
  Rng update_rng(derive_seed(cfg.seed, 1000));
  SharedTrainResult result;
  result.model.scenario = sc;
  result.model.train = cfg;
  auto& nets = result.model.nets;
  nets = make_agent<S>(local.obs_dim, local.act_dim, local.critic_input_dim(), cfg, rng);

  const ActorUpdateOptions actor_opts{cfg.policy_variant, cfg.policy_std, cfg.advantage_baseline};
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity));
  long global_step = 0;

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    std::vector<AgentObservation> obs = env.reset(derive_seed(sc.seed, episode));
    std::vector<Eigen::VectorXd> raw(n_agents);
    detail::EpisodeAccumulator acc(n_agents);

    for (int step = 0; step < cfg.steps_per_episode; ++step, ++global_step) {
      const bool warm = global_step >= cfg.warmup_steps;
      const double noise = exploration_std(cfg, global_step);
      std::vector<int> acting;
      if (step == 0) {
        for (int n = 0; n < n_agents; ++n) acting.push_back(n);
      } else {
        acting.push_back(acting_agent(step, n_agents));
      }
      std::vector<Eigen::VectorXd> features(n_agents);
      for (int n = 0; n < n_agents; ++n) features[n] = agent_features(obs[n], sc);
      for (int n : acting) {
        if (!warm) {
          raw[n] = uniform_action<double>(local.act_dim, rng);
        } else {
          raw[n] = act<S>(nets.actor, features[n].cast<S>(), true, noise, rng).template cast<double>();
        }
      }

      StepResult sr = env.step(project_action(raw, sc, obs));
      for (int n : acting) {
        Experience e;
        e.joint_state = features[n];
        e.joint_action = raw[n];
        e.rewards = Eigen::VectorXd::Constant(1, sr.rewards[n]);
        e.next_joint_state = agent_features(sr.observations[n], sc);
        buffer.push(std::move(e));
      }
      acc.add_step(sr);

      if (warm && buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
        try {
          auto batch = detail::make_batch<S>(
              buffer, buffer.sample_indices(static_cast<std::size_t>(cfg.batch_size), rng));
          const Mlp<S>* target_actor = &nets.target_actor;
          Mat<S> next_actions = target_joint_actions<S>({&target_actor, 1}, batch.next_states, local);
          RowVec<S> rewards = static_cast<S>(cfg.reward_scale) * batch.rewards.row(0);
          RowVec<S> y = td_targets<S>(rewards, batch.next_states, next_actions, nets.target_critic,
                                      sc.discount);
          double critic_loss = critic_update<S>(
              nets.critic, nets.critic_opt, critic_input<S>(nets.critic, batch.states, batch.actions), y);
          double actor_loss = actor_update<S>(0, nets.actor, nets.actor_opt, nets.critic,
                                              ActorBatch<S>{batch.states, batch.actions}, local,
                                              actor_opts, update_rng);
          soft_update<S>(nets.target_critic, nets.critic, cfg.soft_update_rate);
          soft_update<S>(nets.target_actor, nets.actor, cfg.soft_update_rate);
          acc.add_update(critic_loss, actor_loss);
        } catch (const TrainingError& err) {
          throw TrainingError(fmt::format("episode {} step {}: {}", episode, step, err.what()));
        }
      }
      obs = std::move(sr.observations);
    }

    result.history.push_back(acc.finish(episode));
    if (on_episode) on_episode(result.history.back());
  }

  std::ostringstream os;
  os << rng;
  result.rng_state = os.str();
  return result;
}

Policy shared_policy(const SharedModel& model) {
  auto held = std::make_shared<std::vector<Eigen::VectorXd>>();
  return [&model, held](const std::vector<AgentObservation>& obs, int step, Rng& rng) {
    const int n_agents = static_cast<int>(obs.size());
    auto refresh = [&](int n) {
      Vec<TrainScalar> f = agent_features(obs[n], model.scenario).cast<TrainScalar>();
      (*held)[n] = act<TrainScalar>(model.nets.actor, f, false, 0.0, rng).cast<double>();
    };
    if (step == 0 || static_cast<int>(held->size()) != n_agents) {
      held->assign(n_agents, Eigen::VectorXd());
      for (int n = 0; n < n_agents; ++n) refresh(n);
    } else {
      refresh(acting_agent(step, n_agents));
    }
    return project_action(*held, model.scenario, obs);
  };
}

}  // namespace dtvec
