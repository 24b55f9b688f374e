#include "dtvec/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace dtvec {

double path_loss_db(double distance_km) {
  if (!(distance_km > 0.0)) {
    throw std::domain_error("path_loss_db: distance must be > 0");
  }
  return 128.1 + 37.6 * std::log10(distance_km);
}

double large_scale_gain(double distance_m) {
  return std::pow(10.0, -path_loss_db(distance_m / 1000.0) / 10.0);
}

double v2i_rate(double bandwidth_hz, double tx_power_w, double gain, double noise_power_w) {
  return bandwidth_hz * std::log2(1.0 + tx_power_w * gain / noise_power_w);
}

Complex draw_unit_cn(Rng& rng) {
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  double re = half(rng);
  double im = half(rng);
  return {re, im};
}

namespace {

void refresh_gains(ChannelState& ch, const std::vector<VehicleState>& vehicles,
                   const Vec2& bs_position_m) {
  ch.large_scale.resize(vehicles.size());
  ch.gain.resize(vehicles.size());
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    double dist = (vehicles[i].position_m - bs_position_m).norm();
    ch.large_scale[i] = large_scale_gain(dist);
    ch.gain[i] = channel_gain(ch.small_scale[i], ch.large_scale[i]);
  }
}

}  // namespace

ChannelState init_channel(const std::vector<VehicleState>& vehicles, const Vec2& bs_position_m,
                          Rng& rng) {
  ChannelState ch;
  ch.small_scale.reserve(vehicles.size());
  for (std::size_t i = 0; i < vehicles.size(); ++i) ch.small_scale.push_back(draw_unit_cn(rng));
  refresh_gains(ch, vehicles, bs_position_m);
  return ch;
}

ChannelState update_small_scale(const ChannelState& prev, const std::vector<VehicleState>& vehicles,
                                const Vec2& bs_position_m, Rng& rng, FadingMode mode,
                                double fading_corr, double path_loss_exp) {
  if (prev.small_scale.size() != vehicles.size()) {
    throw std::invalid_argument("update_small_scale: channel/fleet size mismatch");
  }
  ChannelState next;
  next.small_scale.resize(vehicles.size());
  const double innovation = std::sqrt(std::max(0.0, 1.0 - fading_corr * fading_corr));
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const Complex& s = prev.small_scale[i];
    switch (mode) {
      case FadingMode::gauss_markov:
        next.small_scale[i] = fading_corr * s + innovation * draw_unit_cn(rng);
        break;
      case FadingMode::literal: {
        double dist = (vehicles[i].position_m - bs_position_m).norm();
        next.small_scale[i] = fading_corr * s + std::pow(dist, -path_loss_exp);
        break;
      }
    }
  }
  refresh_gains(next, vehicles, bs_position_m);
  return next;
}

}  // namespace dtvec
