#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dtvec/env.hpp"

using namespace dtvec;

namespace {

std::vector<Eigen::VectorXd> constant_raw(int n, int k, double omega, double knob) {
  std::vector<Eigen::VectorXd> raw(n, Eigen::VectorXd(2 * k));
  for (auto& r : raw) {
    r.head(k).setConstant(omega);
    r.tail(k).setConstant(knob);
  }
  return raw;
}

TaskRecord record(double deadline, double t_exe, double alloc, double error) {
  TaskRecord t;
  t.task = {100.0, 0.25e6, deadline};
  t.delay.t_exe_s = t_exe;
  t.dt_alloc_hz = alloc;
  t.dt_error_hz = error;
  return t;
}

ScenarioConfig single_task_config() {
  ScenarioConfig c = default_config();
  c.n_vehicles = 1;
  c.k_tasks = 1;
  c.task_size_range_bytes = {100.0, 100.0};
  return c;
}

}  // namespace

TEST_SUITE("env") {

TEST_CASE("reset shapes and determinism") {
  VecEnvironment env(default_config());
  const auto obs = env.reset(5);
  REQUIRE(obs.size() == 4);
  for (const auto& o : obs) {
    CHECK(o.tasks.size() == 3);
    CHECK(o.dt_error_hz.size() == 3);
    CHECK(encode(o).size() == observation_size(3));
    for (const auto& t : o.tasks) {
      CHECK(t.size_bytes >= 100.0);
      CHECK(t.size_bytes <= 150.0);
      CHECK(t.cycles_per_byte == 0.25e6);
      CHECK(t.deadline_s == 0.2);
    }
    for (double e : o.dt_error_hz) {
      CHECK(e >= -0.5e9);
      CHECK(e <= 0.5e9);
    }
  }
  CHECK(observation_size(3) == 3 * 3 + 3 + 2 + 1);
  CHECK(env.reset(5) == obs);
}

TEST_CASE("fixed twin error mode") {
  ScenarioConfig c = default_config();
  c.dt_error_mode = DtErrorMode::fixed;
  c.dt_error_fixed_hz = 0.2e9;
  VecEnvironment env(c);
  env.reset(1);
  for (int t = 0; t < 3; ++t) {
    for (const auto& o : env.observations())
      for (double e : o.dt_error_hz) CHECK(e == 0.2e9);
    env.step(project_action(constant_raw(4, 3, 0.3, 0.2), c, env.observations()));
  }
}

TEST_CASE("observation encoding round-trips") {
  VecEnvironment env(default_config());
  env.reset(3);
  for (int t = 0; t < 5; ++t) {
    for (const auto& o : env.observations()) CHECK(decode(encode(o), 3) == o);
    env.step(project_action(constant_raw(4, 3, 0.5, 0.5), env.config(), env.observations()));
  }
  CHECK_THROWS(decode(Eigen::VectorXd::Zero(5), 3));
}

TEST_CASE("projection bounds") {
  ScenarioConfig c = default_config();
  VecEnvironment env(c);
  const auto& obs = env.reset(1);
  const auto lo = project_action(constant_raw(4, 3, 0.0, 0.0), c, obs);
  for (const auto& a : lo) {
    for (double w : a.offload_ratio) CHECK(w == 0.0);
    for (double f : a.dt_alloc_hz) CHECK(f == c.f_alloc_min_hz);
  }
  c.hard_cap = false;
  const auto hi = project_action(constant_raw(4, 3, 1.0, 1.0), c, obs);
  for (const auto& a : hi)
    for (double f : a.dt_alloc_hz) CHECK(f == c.f_alloc_max_hz);
  const auto clamped = project_action(constant_raw(4, 3, 1.7, -0.3), c, obs);
  for (const auto& a : clamped) {
    for (double w : a.offload_ratio) CHECK(w == 1.0);
    for (double f : a.dt_alloc_hz) CHECK(f == c.f_alloc_min_hz);
  }
}

TEST_CASE("hard cap halves an allocation twice the capacity") {
  ScenarioConfig c = default_config();
  c.n_vehicles = 10;
  c.k_tasks = 1;
  c.dt_error_mode = DtErrorMode::fixed;
  c.dt_error_fixed_hz = 0.0;
  REQUIRE(c.n_vehicles * c.k_tasks * c.f_alloc_max_hz == 2.0 * c.f_server_hz);
  VecEnvironment env(c);
  const auto act = project_action(constant_raw(10, 1, 1.0, 1.0), c, env.reset(2));
  double sum = 0.0;
  for (const auto& a : act) {
    CHECK(a.dt_alloc_hz[0] == doctest::Approx(0.5 * c.f_alloc_max_hz).epsilon(1e-12));
    sum += a.dt_alloc_hz[0];
  }
  CHECK(sum == doctest::Approx(c.f_server_hz).epsilon(1e-12));
}

TEST_CASE("hard cap holds after every projection") {
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {1, 2, 4, 6, 8}) {
    ScenarioConfig c = default_config();
    c.n_vehicles = n;
    VecEnvironment env(c);
    env.reset(n);
    for (int t = 0; t < 50; ++t) {
      std::vector<Eigen::VectorXd> raw(n, Eigen::VectorXd(6));
      for (auto& r : raw)
        for (int i = 0; i < 6; ++i) r(i) = u(rng);
      const auto act = project_action(raw, c, env.observations());
      double demand = 0.0;
      for (int v = 0; v < n; ++v) {
        for (int i = 0; i < 3; ++i) {
          CHECK(act[v].offload_ratio[i] >= 0.0);
          CHECK(act[v].offload_ratio[i] <= 1.0);
          CHECK(act[v].dt_alloc_hz[i] >= c.f_alloc_min_hz);
          CHECK(act[v].dt_alloc_hz[i] <= c.f_alloc_max_hz);
          demand += act[v].dt_alloc_hz[i] + env.observations()[v].dt_error_hz[i];
        }
      }
      CHECK(demand <= c.f_server_hz * (1.0 + 1e-6));
      env.step(act);
    }
  }
}

TEST_CASE("local-only slot") {
  const ScenarioConfig c = single_task_config();
  VecEnvironment env(c);
  env.reset(4);
  const auto res = env.step(project_action(constant_raw(1, 1, 0.0, 0.0), c, env.observations()));
  const auto& v = res.outcome.vehicles[0];
  CHECK(v.tasks[0].delay.t_edge_s == 0.0);
  CHECK(v.total_delay_s == doctest::Approx(5.0e-3).epsilon(1e-12));
  CHECK(v.deadline_violations == 0);
}

TEST_CASE("stepping is deterministic") {
  const ScenarioConfig c = default_config();
  VecEnvironment a(c), b(c);
  a.reset(9);
  b.reset(9);
  for (int t = 0; t < 20; ++t) {
    const double w = 0.05 * t;
    const auto ra = a.step(project_action(constant_raw(4, 3, w, 0.3), c, a.observations()));
    const auto rb = b.step(project_action(constant_raw(4, 3, w, 0.3), c, b.observations()));
    CHECK(ra.rewards == rb.rewards);
    CHECK(ra.observations == rb.observations);
    CHECK(a.channel().gain == b.channel().gain);
  }
}

TEST_CASE("reward examples") {
  ScenarioConfig c = default_config();
  c.n_vehicles = 1;
  std::vector<TaskRecord> one{record(0.2, 0.1, 9.8e9, 0.2e9)};
  CHECK(reward(one, c) == doctest::Approx(46.0).epsilon(1e-12));

  c.reward_beta = 0.0;
  c.reward_eta = 0.0;
  CHECK(reward(one, c) == 0.0);

  c = default_config();
  c.n_vehicles = 1;
  std::vector<TaskRecord> zero{record(0.2, 0.2, 99.5e9, 0.5e9)};
  CHECK(std::abs(reward(zero, c)) <= 1e-12);
}

TEST_CASE("reward sign structure") {
  const ScenarioConfig c = default_config();
  Rng rng(12);
  std::uniform_real_distribution<double> t(0.0, 0.3), f(1e9, 20e9), e(-0.5e9, 0.5e9);
  for (int i = 0; i < 300; ++i) {
    std::vector<TaskRecord> base;
    for (int k = 0; k < 3; ++k) base.push_back(record(0.2, t(rng), f(rng), e(rng)));
    const double r0 = reward(base, c);
    auto slower = base;
    slower[i % 3].delay.t_exe_s += 1e-3;
    CHECK(reward(slower, c) < r0);
    auto leaner = base;
    leaner[i % 3].dt_alloc_hz -= 1e7;
    CHECK(reward(leaner, c) > r0);
  }
}

TEST_CASE("unreachable edge is charged as an overrun") {
  const ScenarioConfig c = default_config();
  std::vector<TaskRecord> t{record(0.2, INFINITY, 1e9, 0.0)};
  const double r = reward(t, c);
  CHECK(std::isfinite(r));
  std::vector<TaskRecord> late{record(0.2, 0.4, 1e9, 0.0)};
  CHECK(r == doctest::Approx(reward(late, c)));
}

TEST_CASE("discounted return") {
  const std::vector<double> one{1.0}, two{1.0, 1.0}, three{2.0, 2.0, 2.0};
  CHECK(discounted_return(one, 0.95) == 1.0);
  CHECK(discounted_return(two, 0.95) == doctest::Approx(1.95));
  CHECK(discounted_return(three, 0.5) == doctest::Approx(3.5));

  Rng rng(2);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> r(40);
  for (double& x : r) x = u(rng);
  const double g = 0.95;
  const std::span<const double> s(r);
  CHECK(discounted_return(s, g) ==
        doctest::Approx(r[0] + g * discounted_return(s.subspan(1), g)).epsilon(1e-12));
}

TEST_CASE("constraint report") {
  ScenarioConfig c = default_config();
  VecEnvironment env(c);
  env.reset(1);
  const auto act = project_action(constant_raw(4, 3, 0.0, 0.0), c, env.observations());
  const auto res = env.step(act);
  const auto rep = check_constraints(act, res.outcome, c);
  CHECK(rep.satisfied());
  CHECK(rep.deadline_misses.empty());
  CHECK(rep.power_ok);
  CHECK(rep.ratio_ok);

  SlotOutcome over;
  over.vehicles.resize(1);
  for (int i = 0; i < 6; ++i) over.vehicles[0].tasks.push_back(record(0.2, 0.01, 19.5e9, 0.5e9));
  over.vehicles[0].tasks[2].delay.t_exe_s = 0.21;
  JointAction a(1);
  a[0].offload_ratio.assign(6, 0.5);
  const auto r2 = check_constraints(a, over, c);
  CHECK(r2.capacity_overflow_hz == doctest::Approx(0.2 * c.f_server_hz));
  REQUIRE(r2.deadline_misses.size() == 1);
  CHECK(r2.deadline_misses[0].task == 2);
  CHECK(r2.deadline_misses[0].excess_s == doctest::Approx(0.01));
  CHECK_FALSE(r2.satisfied());
}

TEST_CASE("trace export") {
  const ScenarioConfig c = default_config();
  VecEnvironment env(c);
  env.reset(1);
  std::ostringstream trace, chan;
  write_trace_header(trace);
  write_channel_header(chan);
  for (long t = 0; t < 3; ++t) {
    write_channel_rows(chan, t, env);
    const auto res = env.step(project_action(constant_raw(4, 3, 0.4, 0.1), c, env.observations()));
    write_trace_rows(trace, t, res.outcome);
  }
  auto lines = [](const std::string& s) { return std::count(s.begin(), s.end(), '\n'); };
  CHECK(lines(trace.str()) == 1 + 3 * 4 * 3);
  CHECK(lines(chan.str()) == 1 + 3 * 4);
}

TEST_CASE("step before reset is an error") {
  VecEnvironment env(default_config());
  CHECK_THROWS_AS(env.step(JointAction(4)), std::logic_error);
}

}  // TEST_SUITE
