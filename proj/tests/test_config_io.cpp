#include <doctest.h>

#include <filesystem>
#include <random>

#include "dtvec/config_io.hpp"

using namespace dtvec;

namespace {

std::string field_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_SUITE("config_io") {

TEST_CASE("default config round-trips") {
  const RunConfig cfg;
  CHECK(parse_ini(to_ini(cfg)) == cfg);
}

TEST_CASE("awkward values round-trip exactly") {
  Rng rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    RunConfig cfg;
    cfg.scenario.fading_corr = u(rng);
    cfg.scenario.noise_power_w = 1e-14 * (1.0 + u(rng));
    cfg.scenario.bs_position_m = Vec2(1000.0 * u(rng), -3.0 * u(rng));
    cfg.scenario.dt_error_fixed_hz = 0.1 + u(rng) * 1e8;
    cfg.scenario.fading_mode = FadingMode::literal;
    cfg.scenario.hard_cap = false;
    cfg.scenario.seed = 1234567890123ULL + i;
    cfg.train.actor_lr = u(rng) * 1e-3;
    cfg.train.actor_hidden = {7, 3 + i};
    cfg.train.policy_variant = PolicyVariant::deterministic;
    cfg.train.optimizer = OptimizerKind::sgd;
    CHECK(parse_ini(to_ini(cfg)) == cfg);
  }
}

TEST_CASE("file round-trip") {
  const auto path = std::filesystem::temp_directory_path() / "dtvec_config_roundtrip.ini";
  RunConfig cfg;
  cfg.scenario.n_vehicles = 6;
  cfg.train.episodes = 12;
  save_config(path, cfg);
  CHECK(load_config(path) == cfg);
  std::filesystem::remove(path);
}

TEST_CASE("missing keys keep the base values") {
  RunConfig base;
  base.scenario.n_vehicles = 9;
  const RunConfig cfg = parse_ini("[tasks]\nk_tasks=2\n", base);
  CHECK(cfg.scenario.n_vehicles == 9);
  CHECK(cfg.scenario.k_tasks == 2);
}

TEST_CASE("errors name the field") {
  CHECK(field_of([] { parse_ini("[fleet]\nwarp=3\n"); }) == "warp");
  CHECK(field_of([] { parse_ini("[tasks]\nn_vehicles=3\n"); }) == "n_vehicles");
  CHECK(field_of([] { parse_ini("[reward]\ndiscount=abc\n"); }) == "discount");
  CHECK(field_of([] { parse_ini("[reward]\ndiscount=1.2\n"); }) == "discount");
  CHECK(field_of([] { parse_ini("[train]\nsoft_update_rate=2\n"); }) == "soft_update_rate");
  CHECK(field_of([] { parse_ini("[channel]\nfading_mode=rician\n"); }) == "fading_mode");
  RunConfig cfg;
  CHECK(field_of([&] {
          apply_override(cfg, "critic_lr", "-1");
          validate(cfg.train);
        }) == "critic_lr");
  CHECK(field_of([&] { apply_override(cfg, "nonsense=1"); }) == "nonsense");
  CHECK(field_of([&] { apply_override(cfg, "n_vehicles"); }) != "<no error>");
}

TEST_CASE("overrides address bare field names") {
  RunConfig cfg;
  apply_override(cfg, "n_vehicles=6");
  apply_override(cfg, "dt_error_mode", "fixed");
  apply_override(cfg, "critic_hidden=32,16");
  apply_override(cfg, "train_seed=99");
  apply_override(cfg, "seed=5");
  CHECK(cfg.scenario.n_vehicles == 6);
  CHECK(cfg.scenario.dt_error_mode == DtErrorMode::fixed);
  CHECK(cfg.train.critic_hidden == std::vector<int>{32, 16});
  CHECK(cfg.train.seed == 99);
  CHECK(cfg.scenario.seed == 5);
  CHECK(get_field(cfg, "n_vehicles") == "6");
}

TEST_CASE("every field is addressable") {
  const RunConfig cfg;
  for (const auto& name : field_names()) {
    RunConfig copy = cfg;
    CHECK_NOTHROW(apply_override(copy, name, get_field(cfg, name)));
    CHECK(copy == cfg);
  }
}

TEST_CASE("config hash") {
  RunConfig a, b;
  CHECK(config_hash(a) == config_hash(b));
  b.scenario.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("number formatting and parsing") {
  CHECK(parse_double("x", "1e-14") == 1e-14);
  CHECK(parse_double_list("x", "1, 2,3") == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(parse_double("x", "1.0abc"), ConfigError);
  CHECK_THROWS_AS(parse_double("x", ""), ConfigError);
  for (double v : {0.1, 1e-14, 123456789.0, -0.5e9, 0.95}) {
    CHECK(parse_double("x", format_double(v)) == v);
  }
}

}  // TEST_SUITE
