#include <doctest.h>

#include <random>

#include "dtvec/scenario.hpp"

using namespace dtvec;

TEST_SUITE("scenario") {

TEST_CASE("defaults carry the table values") {
  const ScenarioConfig c = default_config();
  CHECK(c.bandwidth_hz == 5.0e7);
  CHECK(c.f_server_hz == 1.0e11);
  CHECK(c.f_local_hz == 5.0e9);
  CHECK(c.discount == 0.95);
  CHECK(c.tx_power_w == doctest::Approx(0.2));
  CHECK(c.noise_power_w == doctest::Approx(1e-14).epsilon(1e-12));
  CHECK(c.fading_corr == 0.2);
  CHECK(c.path_loss_exp == 2.0);
  CHECK(c.k_tasks == 3);
  CHECK(c.task_size_range_bytes == Range{100.0, 150.0});
  CHECK(c.cycles_per_byte == 0.25e6);
  CHECK(c.deadline_s == 0.2);
  CHECK(c.dt_error_range_hz == Range{-0.5e9, 0.5e9});
  CHECK(c.reward_eta == 0.5);
  CHECK(c.reward_beta == 10.0);
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("validation names the offending field") {
  auto expect_field = [](ScenarioConfig c, const char* field) {
    try {
      validate(c);
      FAIL("expected ConfigError for " << field);
    } catch (const ConfigError& e) {
      CHECK(e.field() == field);
    }
  };
  ScenarioConfig c = default_config();
  c.discount = 1.0;
  expect_field(c, "discount");
  c = default_config();
  c.fading_corr = 1.5;
  expect_field(c, "fading_corr");
  c = default_config();
  c.bandwidth_hz = 0.0;
  expect_field(c, "bandwidth_hz");
  c = default_config();
  c.task_size_range_bytes = {150.0, 100.0};
  expect_field(c, "task_size_range_bytes");
  c = default_config();
  c.dt_error_range_hz = {-2e9, 0.5e9};
  expect_field(c, "dt_error_range_hz");
  c = default_config();
  c.tx_power_w = 1.0;
  expect_field(c, "tx_power_w");
}

TEST_CASE("spawn fleet") {
  ScenarioConfig c = default_config();
  Rng rng(1);
  c.n_vehicles = 0;
  CHECK(spawn_fleet(c, rng).empty());

  c.n_vehicles = 4;
  Rng a(42), b(42);
  const auto fa = spawn_fleet(c, a), fb = spawn_fleet(c, b);
  REQUIRE(fa.size() == 4);
  CHECK(fa == fb);
  for (const auto& v : fa) {
    CHECK(v.position_m.x() >= 0.0);
    CHECK(v.position_m.x() <= c.road_length_m);
    CHECK(v.speed_mps >= 10.0);
    CHECK(v.speed_mps <= 30.0);
    CHECK((v.direction == 1 || v.direction == -1));
  }
}

TEST_CASE("advance vehicles") {
  std::vector<VehicleState> s{{Vec2(100.0, 0.0), 20.0, 1}, {Vec2(100.0, 0.0), 20.0, -1}};
  auto moved = advance_vehicles(s, 0.2, 1000.0);
  CHECK(moved[0].position_m.x() == doctest::Approx(104.0));
  CHECK(moved[1].position_m.x() == doctest::Approx(96.0));
  CHECK(advance_vehicles(s, 0.0, 1000.0) == s);

  std::vector<VehicleState> edge{{Vec2(999.0, 0.0), 30.0, 1}, {Vec2(0.0, 0.0), 30.0, -1}};
  auto r = advance_vehicles(edge, 0.2, 1000.0);
  CHECK(r[0].position_m.x() == doctest::Approx(995.0));
  CHECK(r[0].direction == -1);
  CHECK(r[1].position_m.x() == doctest::Approx(6.0));
  CHECK(r[1].direction == 1);
}

TEST_CASE("mobility keeps fleet size, speeds and road bounds") {
  ScenarioConfig c = default_config();
  c.n_vehicles = 16;
  Rng rng(9);
  auto fleet = spawn_fleet(c, rng);
  const auto initial = fleet;
  for (int t = 0; t < 2000; ++t) {
    fleet = advance_vehicles(fleet, 0.7, c.road_length_m);
    REQUIRE(fleet.size() == initial.size());
    for (std::size_t i = 0; i < fleet.size(); ++i) {
      CHECK(fleet[i].speed_mps == initial[i].speed_mps);
      CHECK(fleet[i].position_m.x() >= 0.0);
      CHECK(fleet[i].position_m.x() <= c.road_length_m);
    }
  }
}

TEST_CASE("mode names round-trip") {
  CHECK(parse_fading_mode(to_string(FadingMode::literal)) == FadingMode::literal);
  CHECK(parse_fading_mode(to_string(FadingMode::gauss_markov)) == FadingMode::gauss_markov);
  CHECK(parse_dt_error_mode(to_string(DtErrorMode::fixed)) == DtErrorMode::fixed);
  CHECK_THROWS_AS(parse_fading_mode("rician"), ConfigError);
}

}  // TEST_SUITE
