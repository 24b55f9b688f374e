#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "dtvec/compute_delay.hpp"
#include "dtvec/types.hpp"

using namespace dtvec;

namespace {

const Task kTask{100.0, 0.25e6, 0.2};

double rel_err(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_SUITE("compute_delay") {

TEST_CASE("local delay") {
  CHECK(local_delay(kTask, 1.0, 5e9) == 0.0);
  CHECK(rel_err(local_delay(kTask, 0.0, 5e9), 5.0e-3) <= 1e-12);
  CHECK(rel_err(local_delay(kTask, 0.5, 5e9), 2.5e-3) <= 1e-12);
}

TEST_CASE("estimation bias values and sign") {
  CHECK(estimation_bias(kTask, 1.0, 10e9, 0.0) == 0.0);
  const double over = -(25e6 * 0.2e9) / (10e9 * 10.2e9);
  const double under = (25e6 * 0.2e9) / (10e9 * 9.8e9);
  CHECK(rel_err(estimation_bias(kTask, 1.0, 10e9, 0.2e9), over) <= 1e-12);
  CHECK(rel_err(estimation_bias(kTask, 1.0, 10e9, -0.2e9), under) <= 1e-12);
  CHECK(over == doctest::Approx(-4.902e-5).epsilon(1e-3));
  CHECK(under == doctest::Approx(5.102e-5).epsilon(1e-3));
  CHECK(estimation_bias(kTask, 0.0, 10e9, 0.2e9) == 0.0);
}

TEST_CASE("edge delay example and equivalent form") {
  const EdgeDelay e = edge_delay(kTask, 1.0, 7.06e8, 10e9, 0.2e9);
  const double t_tx = 800.0 / 7.06e8;
  CHECK(rel_err(e.t_tx_s, t_tx) <= 1e-12);
  CHECK(rel_err(e.t_edge_compute_s, 2.5e-3) <= 1e-12);
  CHECK(rel_err(e.t_edge_s, t_tx + 25e6 / 10.2e9) <= 1e-12);
  CHECK(e.t_edge_s == doctest::Approx(2.452e-3).epsilon(1e-3));
  CHECK(e.feasible);
  CHECK_FALSE(e.clamped);
}

TEST_CASE("nothing offloaded means no edge delay") {
  const EdgeDelay e = edge_delay(kTask, 0.0, 0.0, 10e9, 0.3e9);
  CHECK(e.t_edge_s == 0.0);
  CHECK(e.t_tx_s == 0.0);
  CHECK(e.feasible);
}

TEST_CASE("offloading over a dead link is infeasible") {
  const EdgeDelay e = edge_delay(kTask, 0.4, 0.0, 10e9, 0.0);
  CHECK_FALSE(e.feasible);
  CHECK(std::isinf(e.t_edge_s));
}

TEST_CASE("exec delay and vehicle total") {
  CHECK(exec_delay(5e-3, 0.0) == 5e-3);
  CHECK(exec_delay(0.0, 2.452e-3) == 2.452e-3);
  CHECK(exec_delay(2.5e-3, 2.452e-3) == 2.5e-3);

  std::vector<DelayBreakdown> b(3);
  b[0].t_exe_s = 5e-3;
  b[1].t_exe_s = 2.5e-3;
  b[2].t_exe_s = 1e-3;
  CHECK(vehicle_total_delay(b) == 5e-3);
  CHECK(vehicle_total_delay(std::span(b).first(1)) == 5e-3);
  for (auto& x : b) x.t_exe_s = 7e-4;
  CHECK(vehicle_total_delay(b) == 7e-4);
  CHECK_THROWS_AS(vehicle_total_delay(std::span<const DelayBreakdown>{}), std::invalid_argument);
}

TEST_CASE("task delay composes the branches") {
  const DelayBreakdown d = task_delay(kTask, {0.5, 10e9}, 7.06e8, 0.2e9, 5e9);
  CHECK(rel_err(d.t_local_s, 2.5e-3) <= 1e-12);
  CHECK(rel_err(d.t_edge_s, 0.5 * 800.0 / 7.06e8 + 12.5e6 / 10.2e9) <= 1e-12);
  CHECK(d.t_exe_s == std::max(d.t_local_s, d.t_edge_s));
}

TEST_CASE("bias identity over random inputs") {
  Rng rng(11);
  std::uniform_real_distribution<double> size(100.0, 150.0), omega(0.0, 1.0), f(1e9, 20e9),
      df(-0.5e9, 0.5e9), c(1e5, 1e6);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Task t{size(rng), c(rng), 0.2};
    const double w = omega(rng), fa = f(rng), e = df(rng);
    const double lhs = w * t.size_bytes * t.cycles_per_byte / fa + estimation_bias(t, w, fa, e);
    const double rhs = w * t.size_bytes * t.cycles_per_byte / (fa + e);
    if (rhs > 0) worst = std::max(worst, rel_err(lhs, rhs));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("epsilon clamp keeps the effective resource positive") {
  const double eps = kDefaultEpsilonHz;
  const EdgeDelay e = edge_delay(kTask, 1.0, 7.06e8, 1e9, -1.5e9, eps);
  CHECK(e.clamped);
  CHECK(std::isfinite(e.t_edge_s));
  CHECK(rel_err(e.t_edge_s, 800.0 / 7.06e8 + 25e6 / eps) <= 1e-12);
  CHECK(rel_err(e.t_edge_compute_s + e.dt_bias_s, 25e6 / eps) <= 1e-12);
}

TEST_CASE("monotonicity in the offload ratio and the effective resource") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0), f(1e9, 20e9), df(-0.5e9, 0.5e9);
  for (int i = 0; i < 500; ++i) {
    const double w1 = u(rng), w2 = u(rng);
    const double lo = std::min(w1, w2), hi = std::max(w1, w2);
    const double fa = f(rng), e = df(rng);
    CHECK(local_delay(kTask, hi, 5e9) <= local_delay(kTask, lo, 5e9));
    const EdgeDelay a = edge_delay(kTask, lo, 7e8, fa, e), b = edge_delay(kTask, hi, 7e8, fa, e);
    CHECK(a.t_tx_s <= b.t_tx_s);
    CHECK(a.t_edge_compute_s <= b.t_edge_compute_s);
    const double e2 = std::min(e + 0.1e9, 0.5e9);
    CHECK(edge_delay(kTask, hi, 7e8, fa, e2).t_edge_s <= b.t_edge_s);
  }
}

TEST_CASE("overestimation beats underestimation on the edge-dominant branch") {
  Rng rng(5);
  std::uniform_real_distribution<double> f(1e9, 20e9), u(0.05, 1.0);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const double fa = f(rng), w = u(rng);
    std::uniform_real_distribution<double> xs(1e6, 0.999 * fa);
    const double x = xs(rng);
    const DelayBreakdown plus = task_delay(kTask, {w, fa}, 7e8, +x, 5e9);
    const DelayBreakdown minus = task_delay(kTask, {w, fa}, 7e8, -x, 5e9);
    if (minus.t_edge_s < minus.t_local_s) continue;
    ++checked;
    CHECK(plus.t_exe_s < minus.t_exe_s);
  }
  CHECK(checked > 100);
}

TEST_CASE("delays are finite and nonnegative") {
  Rng rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0), f(1e9, 20e9), df(-0.5e9, 0.5e9),
      r(1e6, 1e9);
  for (int i = 0; i < 1000; ++i) {
    const DelayBreakdown d = task_delay(kTask, {u(rng), f(rng)}, r(rng), df(rng), 5e9);
    CHECK(std::isfinite(d.t_exe_s));
    CHECK(d.t_local_s >= 0.0);
    CHECK(d.t_tx_s >= 0.0);
    CHECK(d.t_edge_compute_s >= 0.0);
    CHECK(d.t_edge_s >= 0.0);
    CHECK(d.t_exe_s >= 0.0);
  }
}

}  // TEST_SUITE
