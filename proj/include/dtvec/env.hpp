#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dtvec/channel.hpp"
#include "dtvec/compute_delay.hpp"
#include "dtvec/scenario.hpp"

namespace dtvec {

// What one vehicle's agent sees at the start of a slot.
struct AgentObservation {
  std::vector<Task> tasks;
  std::vector<double> dt_error_hz;  // one per task
  Vec2 position_m = Vec2::Zero();
  double gain = 0.0;

  bool operator==(const AgentObservation&) const = default;
};

// Flat layout, length 4K + 3:
//   [d_1, c_1, T_1, ..., d_K, c_K, T_K, df_1, ..., df_K, x, y, g]
int observation_size(int k_tasks);
Eigen::VectorXd encode(const AgentObservation& obs);
AgentObservation decode(const Eigen::VectorXd& flat, int k_tasks);

struct AgentAction {
  std::vector<double> offload_ratio;
  std::vector<double> dt_alloc_hz;
};

using JointAction = std::vector<AgentAction>;

// raw[n] has 2K entries in [0, 1]: K offload ratios then K allocation knobs.
// Allocations map linearly onto [f_alloc_min, f_alloc_max]. With hard_cap on
// and sum(f + df) above the server capacity, every allocation is scaled by a
// common factor so the sum meets capacity, then floored at f_alloc_min.
JointAction project_action(std::span<const Eigen::VectorXd> raw, const ScenarioConfig& config,
                           std::span<const AgentObservation> observations);

struct TaskRecord {
  Task task;
  double dt_error_hz = 0.0;
  double offload_ratio = 0.0;
  double dt_alloc_hz = 0.0;
  DelayBreakdown delay;
};

struct VehicleOutcome {
  std::vector<TaskRecord> tasks;
  double rate_bps = 0.0;
  double total_delay_s = 0.0;
  double reward = 0.0;
  int deadline_violations = 0;
};

struct SlotOutcome {
  std::vector<VehicleOutcome> vehicles;
  double allocated_hz = 0.0;          // sum of f over all tasks
  double capacity_overflow_hz = 0.0;  // max(0, sum(f + df) - F_server)
  int clamp_events = 0;
};

// sum_k [ beta (T_k - t_exe_k) / K - eta (df_k + f_k - F_server) / N ],
// resources in GHz, delays in seconds.
double reward(std::span<const TaskRecord> tasks, const ScenarioConfig& config);

// sum_t gamma^t r_t
double discounted_return(std::span<const double> rewards, double discount);

struct ConstraintReport {
  double capacity_overflow_hz = 0.0;
  struct DeadlineMiss {
    int vehicle;
    int task;
    double excess_s;
  };
  std::vector<DeadlineMiss> deadline_misses;
  bool power_ok = true;
  bool ratio_ok = true;

  bool satisfied() const {
    return capacity_overflow_hz <= 0.0 && deadline_misses.empty() && power_ok && ratio_ok;
  }
};

ConstraintReport check_constraints(const JointAction& action, const SlotOutcome& outcome,
                                   const ScenarioConfig& config);

struct StepResult {
  std::vector<AgentObservation> observations;
  std::vector<double> rewards;
  SlotOutcome outcome;
};

// Single-cell multi-agent environment. One instance is stepped sequentially.
class VecEnvironment {
 public:
  explicit VecEnvironment(ScenarioConfig config);

  // Reseeds the internal generator, spawns the fleet, draws fading and tasks.
  const std::vector<AgentObservation>& reset(std::uint64_t seed);
  const std::vector<AgentObservation>& reset() { return reset(config_.seed); }

  // Evaluates the slot with the current channel and tasks, then moves the
  // vehicles, updates fading and draws the next slot's tasks.
  StepResult step(const JointAction& action);

  const ScenarioConfig& config() const { return config_; }
  const std::vector<AgentObservation>& observations() const { return observations_; }
  const std::vector<VehicleState>& vehicles() const { return vehicles_; }
  const ChannelState& channel() const { return channel_; }
  long slot() const { return slot_; }

  // Uplink rates implied by the current channel.
  std::vector<double> rates() const;

 private:
  void draw_tasks();
  void build_observations();

  ScenarioConfig config_;
  Rng rng_;
  std::vector<VehicleState> vehicles_;
  ChannelState channel_;
  std::vector<std::vector<Task>> tasks_;
  std::vector<std::vector<double>> dt_errors_;
  std::vector<AgentObservation> observations_;
  long slot_ = 0;
  bool ready_ = false;
};

// CSV trace rows: one per (vehicle, task).
void write_trace_header(std::ostream& os);
void write_trace_rows(std::ostream& os, long slot, const SlotOutcome& outcome);

// Channel trace rows: one per vehicle.
void write_channel_header(std::ostream& os);
void write_channel_rows(std::ostream& os, long slot, const VecEnvironment& env);

}  // namespace dtvec
