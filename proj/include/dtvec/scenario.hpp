#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dtvec/types.hpp"

namespace dtvec {

struct Range {
  double min = 0.0;
  double max = 0.0;

  double width() const { return max - min; }
  bool operator==(const Range&) const = default;
};

enum class FadingMode { gauss_markov, literal };
enum class DtErrorMode { uniform, fixed };

std::string to_string(FadingMode mode);
std::string to_string(DtErrorMode mode);
FadingMode parse_fading_mode(const std::string& text);
DtErrorMode parse_dt_error_mode(const std::string& text);

inline constexpr double kMilliwatt = 1e-3;
inline constexpr double kGiga = 1e9;

// All quantities in SI units: Hz, W, bytes, seconds, meters.
struct ScenarioConfig {
  // fleet and tasks
  int n_vehicles = 4;
  int k_tasks = 3;
  Range task_size_range_bytes{100.0, 150.0};
  double cycles_per_byte = 0.25e6;
  double deadline_s = 0.2;

  // radio
  double bandwidth_hz = 50e6;
  double tx_power_w = 200.0 * kMilliwatt;
  double tx_power_max_w = 200.0 * kMilliwatt;
  double noise_power_w = 1e-11 * kMilliwatt;
  double fading_corr = 0.2;
  double path_loss_exp = 2.0;
  FadingMode fading_mode = FadingMode::gauss_markov;

  // computing
  double f_server_hz = 100e9;
  double f_local_hz = 5e9;
  double f_alloc_min_hz = 1e9;
  double f_alloc_max_hz = 20e9;
  double epsilon_hz = 1e7;
  bool hard_cap = true;

  // digital twin estimation error
  Range dt_error_range_hz{-0.5e9, 0.5e9};
  DtErrorMode dt_error_mode = DtErrorMode::uniform;
  double dt_error_fixed_hz = 0.2e9;

  // reward
  double reward_beta = 10.0;
  double reward_eta = 0.5;
  double discount = 0.95;

  // mobility
  double road_length_m = 1000.0;
  Vec2 bs_position_m{500.0, 20.0};
  Range vehicle_speed_range_mps{10.0, 30.0};
  double slot_duration_s = 0.2;

  std::uint64_t seed = 1;

  bool operator==(const ScenarioConfig&) const = default;
};

// Table-driven defaults for the single-cell scenario.
ScenarioConfig default_config();

// Throws ConfigError naming the first offending field.
void validate(const ScenarioConfig& config);

struct VehicleState {
  Vec2 position_m = Vec2::Zero();
  double speed_mps = 0.0;
  int direction = 1;  // +1 or -1 along the road axis

  bool operator==(const VehicleState&) const = default;
};

// Positions uniform on [0, road_length_m] (y = 0), speeds uniform in range,
// direction uniform over {-1, +1}.
std::vector<VehicleState> spawn_fleet(const ScenarioConfig& config, Rng& rng);

// Moves every vehicle along its direction; reflects at both road ends.
std::vector<VehicleState> advance_vehicles(std::vector<VehicleState> states,
                                           double slot_duration_s,
                                           double road_length_m);

}  // namespace dtvec
