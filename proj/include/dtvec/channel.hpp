#pragma once

#include <complex>
#include <vector>

#include "dtvec/scenario.hpp"

namespace dtvec {

using Complex = std::complex<double>;

// Per-vehicle V2I channel; one entry per vehicle, refreshed once per slot.
// Invariant: gain[i] == std::norm(small_scale[i]) * large_scale[i].
struct ChannelState {
  std::vector<Complex> small_scale;
  std::vector<double> large_scale;
  std::vector<double> gain;
};

// 128.1 + 37.6 log10(d), d in km. Throws std::domain_error for d <= 0.
double path_loss_db(double distance_km);

// Linear power gain 10^(-PL/10) for a distance in meters.
double large_scale_gain(double distance_m);

inline double channel_gain(Complex small_scale, double large_scale) {
  return std::norm(small_scale) * large_scale;
}

// Shannon rate B log2(1 + p g / sigma^2) in bit/s.
double v2i_rate(double bandwidth_hz, double tx_power_w, double gain, double noise_power_w);

// Circularly symmetric complex Gaussian with E|z|^2 = 1.
Complex draw_unit_cn(Rng& rng);

// s^0 ~ CN(0, 1); large-scale gain from current positions.
ChannelState init_channel(const std::vector<VehicleState>& vehicles, const Vec2& bs_position_m,
                          Rng& rng);

// gauss-markov: s^t = kappa s^{t-1} + sqrt(1 - kappa^2) e^t, e^t ~ CN(0, 1).
// literal:      s^t = kappa s^{t-1} + dist^{-alpha}, dist in meters.
// Large-scale gain and total gain are recomputed from the (new) positions.
ChannelState update_small_scale(const ChannelState& prev, const std::vector<VehicleState>& vehicles,
                                const Vec2& bs_position_m, Rng& rng, FadingMode mode,
                                double fading_corr, double path_loss_exp);

}  // namespace dtvec
