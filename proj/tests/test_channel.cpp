#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "dtvec/channel.hpp"

using namespace dtvec;

namespace {

std::vector<VehicleState> one_vehicle_at(double x) { return {{Vec2(x, 0.0), 20.0, 1}}; }

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("path loss") {
  CHECK(std::abs(path_loss_db(1.0) - 128.1) <= 1e-9);
  CHECK(std::abs(path_loss_db(0.1) - 90.5) <= 1e-9);
  CHECK(std::abs(path_loss_db(0.5) - (128.1 - 37.6 * 0.30102999566398120)) <= 1e-9);
  CHECK(path_loss_db(0.5) == doctest::Approx(116.79).epsilon(1e-4));
  CHECK_THROWS_AS(path_loss_db(0.0), std::domain_error);
  CHECK_THROWS_AS(path_loss_db(-1.0), std::domain_error);
  CHECK(large_scale_gain(100.0) == doctest::Approx(std::pow(10.0, -9.05)).epsilon(1e-12));
}

TEST_CASE("path loss strictly increases with distance") {
  double prev = path_loss_db(1e-3);
  for (double d = 2e-3; d < 5.0; d *= 1.1) {
    const double pl = path_loss_db(d);
    CHECK(pl > prev);
    prev = pl;
  }
}

TEST_CASE("channel gain") {
  CHECK(channel_gain({1.0, 0.0}, 2e-9) == 2e-9);
  CHECK(channel_gain({0.0, 0.0}, 5.0) == 0.0);
  CHECK(channel_gain({0.6, 0.8}, 1e-9) == doctest::Approx(1e-9).epsilon(1e-12));
}

TEST_CASE("uplink rate") {
  CHECK(v2i_rate(50e6, 0.2, 0.0, 1e-14) == 0.0);
  const double g = 8.913e-10;
  const double snr = 0.2 * g / 1e-14;
  CHECK(snr == doctest::Approx(1.783e4).epsilon(1e-3));
  const double r = v2i_rate(50e6, 0.2, g, 1e-14);
  CHECK(r == doctest::Approx(50e6 * std::log2(1.0 + snr)).epsilon(1e-12));
  CHECK(r == doctest::Approx(7.06e8).epsilon(1e-3));
  CHECK(v2i_rate(100e6, 0.2, g, 1e-14) == doctest::Approx(2.0 * r).epsilon(1e-12));
}

TEST_CASE("rate is monotone in gain, power and bandwidth") {
  Rng rng(21);
  std::uniform_real_distribution<double> lg(-13.0, -7.0), p(0.01, 1.0), b(1e6, 1e8);
  for (int i = 0; i < 1000; ++i) {
    double g1 = std::pow(10.0, lg(rng)), g2 = std::pow(10.0, lg(rng));
    if (g1 > g2) std::swap(g1, g2);
    double p1 = p(rng), p2 = p(rng);
    if (p1 > p2) std::swap(p1, p2);
    double b1 = b(rng), b2 = b(rng);
    if (b1 > b2) std::swap(b1, b2);
    CHECK(v2i_rate(50e6, 0.2, g1, 1e-14) <= v2i_rate(50e6, 0.2, g2, 1e-14));
    CHECK(v2i_rate(50e6, p1, g1, 1e-14) <= v2i_rate(50e6, p2, g1, 1e-14));
    CHECK(v2i_rate(b1, 0.2, g1, 1e-14) <= v2i_rate(b2, 0.2, g1, 1e-14));
  }
}

TEST_CASE("memoryless and frozen fading") {
  const auto veh = one_vehicle_at(300.0);
  const Vec2 bs(500.0, 20.0);
  Rng rng(3);
  const ChannelState s0 = init_channel(veh, bs, rng);

  Rng a(77), b(77);
  const ChannelState s1 = update_small_scale(s0, veh, bs, a, FadingMode::gauss_markov, 0.0, 2.0);
  CHECK(s1.small_scale[0] == draw_unit_cn(b));

  Rng c(78);
  const ChannelState s2 = update_small_scale(s0, veh, bs, c, FadingMode::gauss_markov, 1.0, 2.0);
  CHECK(s2.small_scale[0] == s0.small_scale[0]);
}

TEST_CASE("literal fading formula") {
  const auto veh = one_vehicle_at(500.0);
  const Vec2 bs(500.0, 100.0);
  ChannelState prev;
  prev.small_scale = {{1.0, 0.0}};
  prev.large_scale = {large_scale_gain(100.0)};
  prev.gain = {prev.large_scale[0]};
  Rng rng(1);
  const ChannelState next = update_small_scale(prev, veh, bs, rng, FadingMode::literal, 0.2, 2.0);
  CHECK(next.small_scale[0].real() == doctest::Approx(0.2001).epsilon(1e-12));
  CHECK(next.small_scale[0].imag() == 0.0);
}

TEST_CASE("gain identity holds after every update") {
  std::vector<VehicleState> fleet{{Vec2(10.0, 0.0), 15.0, 1}, {Vec2(900.0, 0.0), 25.0, -1}};
  const Vec2 bs(500.0, 20.0);
  Rng rng(5);
  ChannelState s = init_channel(fleet, bs, rng);
  for (int t = 0; t < 500; ++t) {
    fleet = advance_vehicles(fleet, 0.2, 1000.0);
    s = update_small_scale(s, fleet, bs, rng, t % 2 ? FadingMode::literal : FadingMode::gauss_markov,
                           0.2, 2.0);
    for (std::size_t i = 0; i < fleet.size(); ++i) {
      CHECK(s.large_scale[i] > 0.0);
      CHECK(s.gain[i] == std::norm(s.small_scale[i]) * s.large_scale[i]);
      const double d = (fleet[i].position_m - bs).norm();
      CHECK(s.large_scale[i] == doctest::Approx(large_scale_gain(d)).epsilon(1e-12));
    }
  }
}

TEST_CASE("unit-variance stationarity") {
  const auto veh = one_vehicle_at(250.0);
  const Vec2 bs(500.0, 20.0);
  Rng rng(2024);
  ChannelState s = init_channel(veh, bs, rng);
  double sum = 0.0;
  const int steps = 100000;
  for (int t = 0; t < steps; ++t) {
    s = update_small_scale(s, veh, bs, rng, FadingMode::gauss_markov, 0.2, 2.0);
    sum += std::norm(s.small_scale[0]);
  }
  const double mean = sum / steps;
  CHECK(mean >= 0.95);
  CHECK(mean <= 1.05);
}

}  // TEST_SUITE
