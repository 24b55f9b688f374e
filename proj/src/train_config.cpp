#include "dtvec/train_config.hpp"

#include <cmath>

#include "dtvec/types.hpp"

namespace dtvec {

std::string to_string(PolicyVariant v) {
  return v == PolicyVariant::stochastic ? "stochastic" : "deterministic";
}

std::string to_string(OptimizerKind k) { return k == OptimizerKind::adam ? "adam" : "sgd"; }

PolicyVariant parse_policy_variant(const std::string& text) {
  if (text == "stochastic") return PolicyVariant::stochastic;
  if (text == "deterministic") return PolicyVariant::deterministic;
  throw ConfigError("policy_variant", "unknown variant '" + text + "'");
}

OptimizerKind parse_optimizer_kind(const std::string& text) {
  if (text == "adam") return OptimizerKind::adam;
  if (text == "sgd") return OptimizerKind::sgd;
  throw ConfigError("optimizer", "unknown optimizer '" + text + "'");
}

void validate(const TrainConfig& c) {
  auto require = [](bool ok, const char* field, const char* msg) {
    if (!ok) throw ConfigError(field, msg);
  };
  require(c.episodes >= 1, "episodes", "must be >= 1");
  require(c.steps_per_episode >= 1, "steps_per_episode", "must be >= 1");
  require(c.batch_size >= 1, "batch_size", "must be >= 1");
  require(c.buffer_capacity >= c.batch_size, "buffer_capacity", "must be >= batch_size");
  require(std::isfinite(c.actor_lr) && c.actor_lr > 0.0, "actor_lr", "must be > 0");
  require(std::isfinite(c.critic_lr) && c.critic_lr > 0.0, "critic_lr", "must be > 0");
  require(c.soft_update_rate >= 0.0 && c.soft_update_rate <= 1.0, "soft_update_rate",
          "must lie in [0, 1]");
  require(c.noise_std_initial >= 0.0, "noise_std_initial", "must be >= 0");
  require(c.noise_std_final >= 0.0, "noise_std_final", "must be >= 0");
  require(c.noise_decay_fraction > 0.0 && c.noise_decay_fraction <= 1.0, "noise_decay_fraction",
          "must lie in (0, 1]");
  require(c.warmup_steps >= 0, "warmup_steps", "must be >= 0");
  require(!c.actor_hidden.empty(), "actor_hidden", "needs at least one layer");
  require(!c.critic_hidden.empty(), "critic_hidden", "needs at least one layer");
  for (int h : c.actor_hidden) require(h >= 1, "actor_hidden", "layer sizes must be >= 1");
  for (int h : c.critic_hidden) require(h >= 1, "critic_hidden", "layer sizes must be >= 1");
  require(std::isfinite(c.policy_std) && c.policy_std > 0.0, "policy_std", "must be > 0");
  require(std::isfinite(c.reward_scale) && c.reward_scale > 0.0, "reward_scale", "must be > 0");
}

}  // namespace dtvec
