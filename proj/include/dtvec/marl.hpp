#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtvec/baselines.hpp"
#include "dtvec/env.hpp"
#include "dtvec/mlp.hpp"
#include "dtvec/replay_buffer.hpp"
#include "dtvec/train_config.hpp"

namespace dtvec {

// Precision used by the training loops. Operations are templated so that
// gradient checks run in double.
using TrainScalar = float;

// Raised when a loss or gradient turns non-finite.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int action_size(int k_tasks) { return 2 * k_tasks; }

// Order-1 network features, same 4K + 3 layout as encode():
// sizes / max size, cycles / configured cycles, deadlines / T,
// errors / max |error range|, position / road length, log10(1 + SNR) / 10.
Eigen::VectorXd agent_features(const AgentObservation& obs, const ScenarioConfig& config);

// Stable per-stream seed derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Positions of each agent's block inside joint state / action vectors.
struct JointLayout {
  int n_agents = 0;
  int obs_dim = 0;
  int act_dim = 0;

  int state_dim() const { return n_agents * obs_dim; }
  int action_dim() const { return n_agents * act_dim; }
  int critic_input_dim() const { return state_dim() + action_dim(); }
};

template <typename S>
struct AgentNets {
  Mlp<S> actor;
  Mlp<S> target_actor;
  Mlp<S> critic;
  Mlp<S> target_critic;
  Optimizer<S> actor_opt;
  Optimizer<S> critic_opt;
};

template <typename S>
Mlp<S> make_actor(int obs_dim, int act_dim, const std::vector<int>& hidden) {
  std::vector<int> sizes{obs_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(act_dim);
  std::vector<Activation> acts(hidden.size(), Activation::tanh);
  acts.push_back(Activation::sigmoid);
  return Mlp<S>(sizes, acts);
}

template <typename S>
Mlp<S> make_critic(int input_dim, const std::vector<int>& hidden) {
  std::vector<int> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  std::vector<Activation> acts(hidden.size(), Activation::tanh);
  acts.push_back(Activation::identity);
  return Mlp<S>(sizes, acts);
}

// Online networks are randomly initialized; targets start as exact copies.
template <typename S>
AgentNets<S> make_agent(int obs_dim, int act_dim, int critic_input_dim, const TrainConfig& cfg,
                        Rng& rng) {
  AgentNets<S> a;
  a.actor = make_actor<S>(obs_dim, act_dim, cfg.actor_hidden);
  a.actor.init(rng, 3e-3);
  a.critic = make_critic<S>(critic_input_dim, cfg.critic_hidden);
  a.critic.init(rng, 3e-3);
  a.target_actor = a.actor;
  a.target_critic = a.critic;
  a.actor_opt = Optimizer<S>(cfg.optimizer, cfg.actor_lr, a.actor.num_params());
  a.critic_opt = Optimizer<S>(cfg.optimizer, cfg.critic_lr, a.critic.num_params());
  return a;
}

template <typename S>
Vec<S> uniform_action(int dim, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec<S> a(dim);
  for (int i = 0; i < dim; ++i) a(i) = static_cast<S>(u(rng));
  return a;
}

// Deterministic actor output, or output plus N(0, noise_std^2) clamped to [0, 1].
template <typename S>
Vec<S> act(const Mlp<S>& actor, const Vec<S>& features, bool explore, double noise_std, Rng& rng) {
  Vec<S> a = actor.forward(features);
  if (explore && noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a(i) = static_cast<S>(std::clamp(static_cast<double>(a(i)) + noise(rng), 0.0, 1.0));
    }
  }
  return a;
}

// Stacks joint states over joint actions, one column per sample.
template <typename S>
Mat<S> critic_input(const Mlp<S>& critic, const Mat<S>& states, const Mat<S>& actions) {
  if (states.cols() != actions.cols() || states.rows() + actions.rows() != critic.input_size()) {
    throw std::invalid_argument("critic input layout mismatch: got " +
                                std::to_string(states.rows()) + "+" +
                                std::to_string(actions.rows()) + " rows, critic expects " +
                                std::to_string(critic.input_size()));
  }
  Mat<S> x(critic.input_size(), states.cols());
  x.topRows(states.rows()) = states;
  x.bottomRows(actions.rows()) = actions;
  return x;
}

template <typename S>
S critic_q(const Mlp<S>& critic, const Vec<S>& joint_state, const Vec<S>& joint_action) {
  return critic.forward(critic_input<S>(critic, joint_state, joint_action))(0, 0);
}

// A' = [target_actor_n(s'_n)]_n for every column of next_states.
template <typename S>
Mat<S> target_joint_actions(std::span<const Mlp<S>* const> target_actors, const Mat<S>& next_states,
                            const JointLayout& layout) {
  Mat<S> actions(layout.action_dim(), next_states.cols());
  for (int n = 0; n < layout.n_agents; ++n) {
    actions.middleRows(n * layout.act_dim, layout.act_dim) =
        target_actors[n]->forward(next_states.middleRows(n * layout.obs_dim, layout.obs_dim));
  }
  return actions;
}

// y = r + gamma Q'(S', A'); no terminal masking since episodes have fixed length.
template <typename S>
RowVec<S> td_targets(const RowVec<S>& rewards, const Mat<S>& next_states, const Mat<S>& next_actions,
                     const Mlp<S>& target_critic, double discount) {
  Mat<S> q = target_critic.forward(critic_input<S>(target_critic, next_states, next_actions));
  return rewards + static_cast<S>(discount) * q.row(0);
}

template <typename S>
S td_target(S reward, const Vec<S>& next_joint_state, std::span<const Mlp<S>* const> target_actors,
            const Mlp<S>& target_critic, double discount, const JointLayout& layout) {
  Mat<S> next_actions = target_joint_actions<S>(target_actors, next_joint_state, layout);
  RowVec<S> r(1);
  r(0) = reward;
  return td_targets<S>(r, next_joint_state, next_actions, target_critic, discount)(0);
}

template <typename S>
struct LossGrad {
  S loss = 0;
  Vec<S> grad;
};

// L = mean (y - Q)^2 and dL/dtheta.
template <typename S>
LossGrad<S> critic_loss_gradient(const Mlp<S>& critic, const Mat<S>& inputs, const RowVec<S>& targets) {
  typename Mlp<S>::Tape tape;
  Mat<S> q = critic.forward(inputs, tape);
  RowVec<S> delta = targets - q.row(0);
  const S batch = static_cast<S>(inputs.cols());
  LossGrad<S> out;
  out.loss = delta.squaredNorm() / batch;
  Mat<S> grad_q = (S(-2) / batch) * delta;
  out.grad = critic.backward(tape, grad_q);
  return out;
}

// One optimizer step on the TD loss; returns the pre-update loss.
template <typename S>
S critic_update(Mlp<S>& critic, Optimizer<S>& opt, const Mat<S>& inputs, const RowVec<S>& targets) {
  if (inputs.cols() < 1) throw std::invalid_argument("critic_update: empty batch");
  LossGrad<S> lg = critic_loss_gradient(critic, inputs, targets);
  if (!std::isfinite(static_cast<double>(lg.loss)) || !lg.grad.allFinite()) {
    throw TrainingError("critic loss became non-finite (loss = " +
                        std::to_string(static_cast<double>(lg.loss)) + ")");
  }
  opt.step(critic.params(), lg.grad);
  return lg.loss;
}

// Surrogate whose gradient is the score-function estimator
//   -mean_b weight_b * grad log N(action_b; actor(state_b), std^2 I).
// `weights` play the role of Q (or Q minus a baseline).
template <typename S>
LossGrad<S> gaussian_policy_loss_gradient(const Mlp<S>& actor, const Mat<S>& states,
                                          const Mat<S>& actions, const RowVec<S>& weights,
                                          double policy_std) {
  typename Mlp<S>::Tape tape;
  Mat<S> mean = actor.forward(states, tape);
  const S var = static_cast<S>(policy_std * policy_std);
  const S batch = static_cast<S>(states.cols());
  Mat<S> diff = actions - mean;
  RowVec<S> log_prob = (-diff.array().square() / (S(2) * var)).colwise().sum().matrix();
  log_prob.array() -= static_cast<S>(0.5 * static_cast<double>(actions.rows()) *
                                     std::log(2.0 * M_PI * policy_std * policy_std));
  LossGrad<S> out;
  out.loss = -(weights.array() * log_prob.array()).sum() / batch;
  // d(-w log p)/d(mean) = -w (a - mean) / var
  Mat<S> grad_mean = -(diff.array().rowwise() * weights.array()).matrix() / (var * batch);
  out.grad = actor.backward(tape, grad_mean);
  return out;
}

// Everything an actor update needs besides the networks.
template <typename S>
struct ActorBatch {
  Mat<S> states;   // joint states, one column per sample
  Mat<S> actions;  // joint actions from the replay buffer
};

struct ActorUpdateOptions {
  PolicyVariant variant = PolicyVariant::stochastic;
  double policy_std = 0.1;
  bool advantage_baseline = true;
};

// Gradient of the actor objective for agent `agent` (loss sign: descend).
// stochastic: a ~ N(actor(s_n), std^2), weight = Q(S, A[a_n := a]) minus
//             Q(S, A[a_n := actor(s_n)]) when advantage_baseline is set.
// deterministic: -mean dQ/da_n * dactor/dtheta at a_n = actor(s_n).
template <typename S>
LossGrad<S> actor_gradient(int agent, const Mlp<S>& actor, const Mlp<S>& critic,
                           const ActorBatch<S>& batch, const JointLayout& layout,
                           const ActorUpdateOptions& opts, Rng& rng) {
  const Mat<S> local = batch.states.middleRows(agent * layout.obs_dim, layout.obs_dim);
  const Eigen::Index b = batch.states.cols();
  Mat<S> mean = actor.forward(local);
  Mat<S> with_mean = batch.actions;
  with_mean.middleRows(agent * layout.act_dim, layout.act_dim) = mean;

  if (opts.variant == PolicyVariant::stochastic) {
    std::normal_distribution<double> noise(0.0, opts.policy_std);
    Mat<S> sampled = mean;
    for (Eigen::Index j = 0; j < sampled.cols(); ++j)
      for (Eigen::Index i = 0; i < sampled.rows(); ++i)
        sampled(i, j) += static_cast<S>(noise(rng));
    Mat<S> with_sample = batch.actions;
    with_sample.middleRows(agent * layout.act_dim, layout.act_dim) =
        sampled.cwiseMax(S(0)).cwiseMin(S(1));
    RowVec<S> weights = critic.forward(critic_input<S>(critic, batch.states, with_sample)).row(0);
    if (opts.advantage_baseline) {
      weights -= critic.forward(critic_input<S>(critic, batch.states, with_mean)).row(0);
    }
    return gaussian_policy_loss_gradient<S>(actor, local, sampled, weights, opts.policy_std);
  }

  typename Mlp<S>::Tape critic_tape;
  Mat<S> q = critic.forward(critic_input<S>(critic, batch.states, with_mean), critic_tape);
  Mat<S> grad_input;
  Mat<S> dq = Mat<S>::Constant(1, b, S(-1) / static_cast<S>(b));
  critic.backward(critic_tape, dq, &grad_input);
  Mat<S> grad_mean = grad_input.middleRows(layout.state_dim() + agent * layout.act_dim, layout.act_dim);
  typename Mlp<S>::Tape actor_tape;
  actor.forward(local, actor_tape);
  LossGrad<S> out;
  out.loss = -q.mean();
  out.grad = actor.backward(actor_tape, grad_mean);
  return out;
}

// One optimizer step for agent `agent`'s actor; returns the surrogate loss.
template <typename S>
S actor_update(int agent, Mlp<S>& actor, Optimizer<S>& opt, const Mlp<S>& critic,
               const ActorBatch<S>& batch, const JointLayout& layout,
               const ActorUpdateOptions& opts, Rng& rng) {
  if (batch.states.cols() < 1) throw std::invalid_argument("actor_update: empty batch");
  LossGrad<S> lg = actor_gradient<S>(agent, actor, critic, batch, layout, opts, rng);
  if (!lg.grad.allFinite()) throw TrainingError("actor gradient became non-finite");
  opt.step(actor.params(), lg.grad);
  return lg.loss;
}

// theta' <- rate * theta + (1 - rate) * theta'
template <typename S>
void soft_update(Vec<S>& target, const Vec<S>& online, double rate) {
  if (target.size() != online.size()) throw std::invalid_argument("soft_update: shape mismatch");
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("soft_update: rate outside [0, 1]");
  if (rate == 1.0) {
    target = online;
  } else if (rate > 0.0) {
    const S r = static_cast<S>(rate);
    target = r * online + (S(1) - r) * target;
  }
}

template <typename S>
void soft_update(Mlp<S>& target, const Mlp<S>& online, double rate) {
  if (!target.same_shape(online)) throw std::invalid_argument("soft_update: shape mismatch");
  soft_update<S>(target.params(), online.params(), rate);
}

// Per-episode training metrics.
struct EpisodeMetrics {
  int episode = 0;
  std::vector<double> mean_reward_per_agent;
  double mean_reward = 0.0;        // mean over agents and steps
  double critic_loss = 0.0;        // mean over updates in the episode (0 if none)
  double actor_loss = 0.0;
  double mean_total_delay = 0.0;   // mean t_total over vehicles and steps
  int violations = 0;              // deadline misses in the episode
  double resource_usage_ghz = 0.0; // mean per-slot sum of allocations
};

struct MarlModel {
  ScenarioConfig scenario;
  TrainConfig train;
  std::vector<AgentNets<TrainScalar>> agents;
};

struct TrainResult {
  MarlModel model;
  std::vector<EpisodeMetrics> history;
  std::string rng_state;
};

using EpisodeCallback = std::function<void(const EpisodeMetrics&)>;

// Exploration noise std at a global step: linear from initial to final over
// the first noise_decay_fraction of all steps, constant afterwards.
double exploration_std(const TrainConfig& cfg, long global_step);

// Centralized training, decentralized execution. Each env step:
// observe -> act -> step -> store -> (when warm) sample batch -> for every
// agent: critic update, actor update, soft updates of both targets.
// Episode e resets the environment with derive_seed(scenario.seed, e).
TrainResult train(VecEnvironment& env, const TrainConfig& cfg,
                  const EpisodeCallback& on_episode = {});

// Decentralized execution: each agent's deterministic actor output on its own
// observation, projected onto the constraints.
Policy marl_policy(const MarlModel& model);

}  // namespace dtvec
