#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dtvec/checkpoint.hpp"

using namespace dtvec;
namespace fs = std::filesystem;

namespace {

TrainConfig tiny() {
  TrainConfig t;
  t.episodes = 1;
  t.steps_per_episode = 3;
  t.batch_size = 1;
  t.warmup_steps = 0;
  t.actor_hidden = {6};
  t.critic_hidden = {7};
  t.seed = 99;
  return t;
}

fs::path scratch_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dtvec_checkpoint_test";
  fs::create_directories(dir);
  return dir / name;
}

template <typename S>
void check_same(const AgentNets<S>& a, const AgentNets<S>& b) {
  CHECK(a.actor.params() == b.actor.params());
  CHECK(a.critic.params() == b.critic.params());
  CHECK(a.target_actor.params() == b.target_actor.params());
  CHECK(a.target_critic.params() == b.target_critic.params());
  CHECK(a.actor.sizes() == b.actor.sizes());
  CHECK(a.critic.activations() == b.critic.activations());
}

}  // namespace

TEST_SUITE("checkpoint") {

TEST_CASE("marl round trip") {
  ScenarioConfig c = default_config();
  c.n_vehicles = 2;
  VecEnvironment env(c);
  const TrainResult r = train(env, tiny());
  const fs::path p = scratch_file("marl.json");
  save_checkpoint(p, r.model, r.rng_state);
  const LoadedCheckpoint l = load_checkpoint(p);
  CHECK(l.algorithm == "marl");
  REQUIRE(l.marl.has_value());
  CHECK_FALSE(l.shared.has_value());
  CHECK(l.rng_state == r.rng_state);
  CHECK(l.marl->scenario == r.model.scenario);
  CHECK(l.marl->train == r.model.train);
  REQUIRE(l.marl->agents.size() == 2);
  for (int i = 0; i < 2; ++i) check_same(l.marl->agents[i], r.model.agents[i]);

  // Same policy output after reload.
  VecEnvironment e(c);
  e.reset(3);
  Rng a(1), b(1);
  const JointAction x = marl_policy(r.model)(e.observations(), 0, a);
  const JointAction y = marl_policy(*l.marl)(e.observations(), 0, b);
  for (int v = 0; v < 2; ++v) {
    CHECK(x[v].offload_ratio == y[v].offload_ratio);
    CHECK(x[v].dt_alloc_hz == y[v].dt_alloc_hz);
  }
}

TEST_CASE("shared round trip") {
  const ScenarioConfig c = default_config();
  VecEnvironment env(c);
  const SharedTrainResult r = shared_baseline_train(env, tiny());
  const fs::path p = scratch_file("shared.json");
  save_checkpoint(p, r.model, r.rng_state);
  const LoadedCheckpoint l = load_checkpoint(p);
  CHECK(l.algorithm == "shared");
  REQUIRE(l.shared.has_value());
  CHECK(l.shared->scenario == c);
  CHECK(l.shared->train == r.model.train);
  check_same(l.shared->nets, r.model.nets);
}

TEST_CASE("malformed files are rejected") {
  const fs::path p = scratch_file("bad.json");
  {
    std::ofstream(p) << "{\"format\": \"something else\"}";
  }
  CHECK_THROWS_AS(load_checkpoint(p), std::runtime_error);
  {
    std::ofstream(p) << "not json";
  }
  CHECK_THROWS_AS(load_checkpoint(p), std::runtime_error);
  CHECK_THROWS_AS(load_checkpoint(scratch_file("missing.json")), std::runtime_error);
}

}  // TEST_SUITE
