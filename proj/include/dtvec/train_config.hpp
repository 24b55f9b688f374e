#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dtvec {

enum class PolicyVariant { stochastic, deterministic };
enum class OptimizerKind { adam, sgd };

std::string to_string(PolicyVariant v);
std::string to_string(OptimizerKind k);
PolicyVariant parse_policy_variant(const std::string& text);
OptimizerKind parse_optimizer_kind(const std::string& text);

struct TrainConfig {
  int episodes = 500;
  int steps_per_episode = 100;
  int batch_size = 64;
  int buffer_capacity = 100000;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  // Target-network blending rate (theta' <- tau*theta + (1-tau)*theta').
  double soft_update_rate = 0.01;
  double noise_std_initial = 0.3;
  double noise_std_final = 0.05;
  // Fraction of total env steps over which exploration noise decays linearly.
  double noise_decay_fraction = 0.5;
  int warmup_steps = 1000;
  std::vector<int> actor_hidden{128, 128};
  std::vector<int> critic_hidden{256, 256};
  // Standard deviation of the Gaussian policy used by the stochastic update.
  double policy_std = 0.1;
  PolicyVariant policy_variant = PolicyVariant::stochastic;
  // Subtract Q at the policy mean from the sampled Q (same expectation).
  bool advantage_baseline = true;
  OptimizerKind optimizer = OptimizerKind::adam;
  // Rewards are multiplied by this before entering TD targets.
  double reward_scale = 0.01;
  std::uint64_t seed = 7;

  bool operator==(const TrainConfig&) const = default;
};

// Throws ConfigError naming the first offending field.
void validate(const TrainConfig& config);

}  // namespace dtvec
