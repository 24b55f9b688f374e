#pragma once

#include <span>

namespace dtvec {

// One computing task: d bytes, c cycles per byte, deadline T.
struct Task {
  double size_bytes = 0.0;
  double cycles_per_byte = 0.0;
  double deadline_s = 0.0;

  double workload_cycles() const { return size_bytes * cycles_per_byte; }
  bool operator==(const Task&) const = default;
};

// Offloading ratio and the digital twin's estimated edge allocation.
struct OffloadDecision {
  double offload_ratio = 0.0;
  double dt_alloc_hz = 0.0;
};

inline constexpr double kDefaultEpsilonHz = 1e7;

struct EdgeDelay {
  double t_tx_s = 0.0;
  double t_edge_compute_s = 0.0;
  double dt_bias_s = 0.0;
  double t_edge_s = 0.0;
  // false when part of the task is offloaded over a zero-rate link
  bool feasible = true;
  // true when the effective edge resource was clamped at epsilon
  bool clamped = false;
};

struct DelayBreakdown {
  double t_local_s = 0.0;
  double t_tx_s = 0.0;
  double t_edge_compute_s = 0.0;
  double dt_bias_s = 0.0;  // may be negative
  double t_edge_s = 0.0;
  double t_exe_s = 0.0;
  bool feasible = true;
  bool clamped = false;
};

// (1 - omega) d c / F_local
double local_delay(const Task& task, double offload_ratio, double f_local_hz);

// -omega d c df / (f (f + df)). When f + df < epsilon_hz the error is raised
// to epsilon_hz - f, so the effective edge resource never drops below epsilon.
double estimation_bias(const Task& task, double offload_ratio, double dt_alloc_hz,
                       double dt_error_hz, double epsilon_hz = kDefaultEpsilonHz);

// Transmission uses 8 d bits against the rate in bit/s.
EdgeDelay edge_delay(const Task& task, double offload_ratio, double rate_bps,
                     double dt_alloc_hz, double dt_error_hz,
                     double epsilon_hz = kDefaultEpsilonHz);

// Local and offloaded parts run in parallel.
inline double exec_delay(double t_local_s, double t_edge_s) {
  return t_local_s > t_edge_s ? t_local_s : t_edge_s;
}

DelayBreakdown task_delay(const Task& task, const OffloadDecision& decision, double rate_bps,
                          double dt_error_hz, double f_local_hz,
                          double epsilon_hz = kDefaultEpsilonHz);

// Max of t_exe over the vehicle's tasks. Throws std::invalid_argument if empty.
double vehicle_total_delay(std::span<const DelayBreakdown> breakdowns);

}  // namespace dtvec
