#include "dtvec/compute_delay.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dtvec {

double local_delay(const Task& task, double offload_ratio, double f_local_hz) {
  return (1.0 - offload_ratio) * task.workload_cycles() / f_local_hz;
}

double estimation_bias(const Task& task, double offload_ratio, double dt_alloc_hz,
                       double dt_error_hz, double epsilon_hz) {
  // clamping the error keeps f + df >= epsilon and the bias identity intact
  double error = std::max(dt_error_hz, epsilon_hz - dt_alloc_hz);
  return -offload_ratio * task.workload_cycles() * error / (dt_alloc_hz * (dt_alloc_hz + error));
}

EdgeDelay edge_delay(const Task& task, double offload_ratio, double rate_bps, double dt_alloc_hz,
                     double dt_error_hz, double epsilon_hz) {
  EdgeDelay out;
  if (offload_ratio <= 0.0) return out;

  out.clamped = dt_alloc_hz + dt_error_hz < epsilon_hz;
  if (rate_bps > 0.0) {
    out.t_tx_s = offload_ratio * task.size_bytes * 8.0 / rate_bps;
  } else {
    out.feasible = false;
    out.t_tx_s = std::numeric_limits<double>::infinity();
  }
  out.t_edge_compute_s = offload_ratio * task.workload_cycles() / dt_alloc_hz;
  out.dt_bias_s = estimation_bias(task, offload_ratio, dt_alloc_hz, dt_error_hz, epsilon_hz);
  out.t_edge_s = out.t_tx_s + out.t_edge_compute_s + out.dt_bias_s;
  return out;
}

DelayBreakdown task_delay(const Task& task, const OffloadDecision& decision, double rate_bps,
                          double dt_error_hz, double f_local_hz, double epsilon_hz) {
  DelayBreakdown b;
  b.t_local_s = local_delay(task, decision.offload_ratio, f_local_hz);
  EdgeDelay e = edge_delay(task, decision.offload_ratio, rate_bps, decision.dt_alloc_hz,
                           dt_error_hz, epsilon_hz);
  b.t_tx_s = e.t_tx_s;
  b.t_edge_compute_s = e.t_edge_compute_s;
  b.dt_bias_s = e.dt_bias_s;
  b.t_edge_s = e.t_edge_s;
  b.feasible = e.feasible;
  b.clamped = e.clamped;
  b.t_exe_s = exec_delay(b.t_local_s, b.t_edge_s);
  return b;
}

double vehicle_total_delay(std::span<const DelayBreakdown> breakdowns) {
  if (breakdowns.empty()) {
    throw std::invalid_argument("vehicle_total_delay: no tasks");
  }
  double worst = breakdowns.front().t_exe_s;
  for (const auto& b : breakdowns) worst = std::max(worst, b.t_exe_s);
  return worst;
}

}  // namespace dtvec
