#include "dtvec/scenario.hpp"

#include <cmath>

namespace dtvec {

std::string to_string(FadingMode mode) {
  return mode == FadingMode::gauss_markov ? "gauss-markov" : "literal";
}

std::string to_string(DtErrorMode mode) {
  return mode == DtErrorMode::uniform ? "uniform" : "fixed";
}

FadingMode parse_fading_mode(const std::string& text) {
  if (text == "gauss-markov") return FadingMode::gauss_markov;
  if (text == "literal") return FadingMode::literal;
  throw ConfigError("fading_mode", "unknown mode '" + text + "' (expected gauss-markov or literal)");
}

DtErrorMode parse_dt_error_mode(const std::string& text) {
  if (text == "uniform") return DtErrorMode::uniform;
  if (text == "fixed") return DtErrorMode::fixed;
  throw ConfigError("dt_error_mode", "unknown mode '" + text + "' (expected uniform or fixed)");
}

ScenarioConfig default_config() { return ScenarioConfig{}; }

namespace {

void require(bool ok, const char* field, const char* message) {
  if (!ok) throw ConfigError(field, message);
}

void require_positive(double value, const char* field) {
  require(std::isfinite(value) && value > 0.0, field, "must be finite and > 0");
}

void require_range(const Range& r, const char* field) {
  require(std::isfinite(r.min) && std::isfinite(r.max), field, "bounds must be finite");
  require(r.min <= r.max, field, "min must not exceed max");
}

}  // namespace

void validate(const ScenarioConfig& c) {
  require(c.n_vehicles >= 0, "n_vehicles", "must be >= 0");
  require(c.k_tasks >= 1, "k_tasks", "must be >= 1");
  require_range(c.task_size_range_bytes, "task_size_range_bytes");
  require(c.task_size_range_bytes.min > 0.0, "task_size_range_bytes", "sizes must be > 0");
  require_positive(c.cycles_per_byte, "cycles_per_byte");
  require_positive(c.deadline_s, "deadline_s");
  require_positive(c.bandwidth_hz, "bandwidth_hz");
  require_positive(c.tx_power_w, "tx_power_w");
  require_positive(c.tx_power_max_w, "tx_power_max_w");
  require(c.tx_power_w <= c.tx_power_max_w, "tx_power_w", "must not exceed tx_power_max_w");
  require_positive(c.noise_power_w, "noise_power_w");
  require(c.fading_corr >= 0.0 && c.fading_corr <= 1.0, "fading_corr", "must lie in [0, 1]");
  require_positive(c.path_loss_exp, "path_loss_exp");
  require_positive(c.f_server_hz, "f_server_hz");
  require_positive(c.f_local_hz, "f_local_hz");
  require_positive(c.f_alloc_min_hz, "f_alloc_min_hz");
  require_positive(c.f_alloc_max_hz, "f_alloc_max_hz");
  require(c.f_alloc_min_hz <= c.f_alloc_max_hz, "f_alloc_max_hz", "must be >= f_alloc_min_hz");
  require_positive(c.epsilon_hz, "epsilon_hz");
  require_range(c.dt_error_range_hz, "dt_error_range_hz");
  require(c.f_alloc_min_hz + c.dt_error_range_hz.min > 0.0, "dt_error_range_hz",
          "f_alloc_min_hz + dt_error_range_hz.min must be > 0");
  require(std::isfinite(c.dt_error_fixed_hz), "dt_error_fixed_hz", "must be finite");
  require(c.f_alloc_min_hz + c.dt_error_fixed_hz > 0.0, "dt_error_fixed_hz",
          "f_alloc_min_hz + dt_error_fixed_hz must be > 0");
  require(std::isfinite(c.reward_beta) && c.reward_beta >= 0.0, "reward_beta", "must be finite and >= 0");
  require(std::isfinite(c.reward_eta) && c.reward_eta >= 0.0, "reward_eta", "must be finite and >= 0");
  require(c.discount > 0.0 && c.discount < 1.0, "discount", "must lie in (0, 1)");
  require_positive(c.road_length_m, "road_length_m");
  require(c.bs_position_m.allFinite(), "bs_position_m", "must be finite");
  require_range(c.vehicle_speed_range_mps, "vehicle_speed_range_mps");
  require(c.vehicle_speed_range_mps.min > 0.0, "vehicle_speed_range_mps", "speeds must be > 0");
  require_positive(c.slot_duration_s, "slot_duration_s");
}

std::vector<VehicleState> spawn_fleet(const ScenarioConfig& config, Rng& rng) {
  std::uniform_real_distribution<double> pos(0.0, config.road_length_m);
  std::uniform_real_distribution<double> speed(config.vehicle_speed_range_mps.min,
                                               config.vehicle_speed_range_mps.max);
  std::bernoulli_distribution forward(0.5);

  std::vector<VehicleState> fleet;
  fleet.reserve(static_cast<std::size_t>(config.n_vehicles));
  for (int n = 0; n < config.n_vehicles; ++n) {
    VehicleState v;
    v.position_m = Vec2(pos(rng), 0.0);
    v.speed_mps = speed(rng);
    v.direction = forward(rng) ? 1 : -1;
    fleet.push_back(v);
  }
  return fleet;
}

std::vector<VehicleState> advance_vehicles(std::vector<VehicleState> states,
                                           double slot_duration_s,
                                           double road_length_m) {
  for (auto& v : states) {
    double x = v.position_m.x() + v.direction * v.speed_mps * slot_duration_s;
    // reflect until inside; handles steps longer than the road
    while (x < 0.0 || x > road_length_m) {
      if (x > road_length_m) {
        x = 2.0 * road_length_m - x;
      } else {
        x = -x;
      }
      v.direction = -v.direction;
    }
    v.position_m.x() = x;
  }
  return states;
}

}  // namespace dtvec
