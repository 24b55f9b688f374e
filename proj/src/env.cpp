#include "dtvec/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace dtvec {

int observation_size(int k_tasks) { return 4 * k_tasks + 3; }

Eigen::VectorXd encode(const AgentObservation& obs) {
  const int k = static_cast<int>(obs.tasks.size());
  if (static_cast<int>(obs.dt_error_hz.size()) != k) {
    throw std::invalid_argument("encode: one DT error per task required");
  }
  Eigen::VectorXd flat(observation_size(k));
  for (int i = 0; i < k; ++i) {
    flat(3 * i) = obs.tasks[i].size_bytes;
    flat(3 * i + 1) = obs.tasks[i].cycles_per_byte;
    flat(3 * i + 2) = obs.tasks[i].deadline_s;
    flat(3 * k + i) = obs.dt_error_hz[i];
  }
  flat(4 * k) = obs.position_m.x();
  flat(4 * k + 1) = obs.position_m.y();
  flat(4 * k + 2) = obs.gain;
  return flat;
}

AgentObservation decode(const Eigen::VectorXd& flat, int k_tasks) {
  if (flat.size() != observation_size(k_tasks)) {
    throw std::invalid_argument("decode: observation length does not match 4K + 3");
  }
  AgentObservation obs;
  for (int i = 0; i < k_tasks; ++i) {
    obs.tasks.push_back({flat(3 * i), flat(3 * i + 1), flat(3 * i + 2)});
    obs.dt_error_hz.push_back(flat(3 * k_tasks + i));
  }
  obs.position_m = Vec2(flat(4 * k_tasks), flat(4 * k_tasks + 1));
  obs.gain = flat(4 * k_tasks + 2);
  return obs;
}

namespace {

// Largest s with sum(max(floor, s * f)) <= budget. Allocations that would drop
// below the floor are pinned there and the rest share what is left.
double floored_scale(const JointAction& joint, double budget, double floor) {
  std::vector<double> f;
  for (const auto& a : joint) f.insert(f.end(), a.dt_alloc_hz.begin(), a.dt_alloc_hz.end());
  std::sort(f.begin(), f.end());
  double rest = std::accumulate(f.begin(), f.end(), 0.0);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double s = (budget - static_cast<double>(j) * floor) / rest;
    if (s <= 0.0) return 0.0;
    if (s * f[j] >= floor) return s;
    rest -= f[j];
  }
  return 0.0;
}

}  // namespace

JointAction project_action(std::span<const Eigen::VectorXd> raw, const ScenarioConfig& config,
                           std::span<const AgentObservation> observations) {
  const int k = config.k_tasks;
  if (raw.size() != observations.size()) {
    throw std::invalid_argument("project_action: one raw action per agent required");
  }
  JointAction joint(raw.size());
  double alloc_sum = 0.0;
  double error_sum = 0.0;
  for (std::size_t n = 0; n < raw.size(); ++n) {
    if (raw[n].size() != 2 * k) {
      throw std::invalid_argument("project_action: raw action must have 2K entries");
    }
    auto& a = joint[n];
    a.offload_ratio.resize(k);
    a.dt_alloc_hz.resize(k);
    for (int i = 0; i < k; ++i) {
      a.offload_ratio[i] = std::clamp(raw[n](i), 0.0, 1.0);
      double knob = std::clamp(raw[n](k + i), 0.0, 1.0);
      a.dt_alloc_hz[i] =
          config.f_alloc_min_hz + knob * (config.f_alloc_max_hz - config.f_alloc_min_hz);
      alloc_sum += a.dt_alloc_hz[i];
      error_sum += observations[n].dt_error_hz[i];
    }
  }
  if (config.hard_cap && alloc_sum + error_sum > config.f_server_hz && alloc_sum > 0.0) {
    const double scale =
        floored_scale(joint, config.f_server_hz - error_sum, config.f_alloc_min_hz);
    for (auto& a : joint) {
      for (double& f : a.dt_alloc_hz) f = std::max(config.f_alloc_min_hz, f * scale);
    }
  }
  return joint;
}

double reward(std::span<const TaskRecord> tasks, const ScenarioConfig& config) {
  const double k = static_cast<double>(tasks.size());
  const double n = static_cast<double>(std::max(config.n_vehicles, 1));
  const double f_max_ghz = config.f_server_hz / kGiga;
  double r = 0.0;
  for (const auto& t : tasks) {
    double t_exe = t.delay.t_exe_s;
    // an unreachable edge counts as a full-deadline overrun
    if (!std::isfinite(t_exe)) t_exe = 2.0 * t.task.deadline_s;
    r += config.reward_beta * (t.task.deadline_s - t_exe) / k;
    r -= config.reward_eta * ((t.dt_error_hz + t.dt_alloc_hz) / kGiga - f_max_ghz) / n;
  }
  return r;
}

double discounted_return(std::span<const double> rewards, double discount) {
  double total = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    total += weight * r;
    weight *= discount;
  }
  return total;
}

ConstraintReport check_constraints(const JointAction& action, const SlotOutcome& outcome,
                                   const ScenarioConfig& config) {
  ConstraintReport report;
  double demand = 0.0;
  for (std::size_t n = 0; n < outcome.vehicles.size(); ++n) {
    const auto& v = outcome.vehicles[n];
    for (std::size_t k = 0; k < v.tasks.size(); ++k) {
      const auto& t = v.tasks[k];
      demand += t.dt_alloc_hz + t.dt_error_hz;
      if (!(t.delay.t_exe_s <= t.task.deadline_s)) {
        report.deadline_misses.push_back(
            {static_cast<int>(n), static_cast<int>(k), t.delay.t_exe_s - t.task.deadline_s});
      }
    }
  }
  report.capacity_overflow_hz = std::max(0.0, demand - config.f_server_hz);
  report.power_ok = config.tx_power_w <= config.tx_power_max_w;
  for (const auto& a : action) {
    for (double w : a.offload_ratio) {
      if (!(w >= 0.0 && w <= 1.0)) report.ratio_ok = false;
    }
  }
  return report;
}

VecEnvironment::VecEnvironment(ScenarioConfig config) : config_(std::move(config)) {
  validate(config_);
}

void VecEnvironment::draw_tasks() {
  const int n = config_.n_vehicles;
  const int k = config_.k_tasks;
  std::uniform_real_distribution<double> size(config_.task_size_range_bytes.min,
                                              config_.task_size_range_bytes.max);
  std::uniform_real_distribution<double> error(config_.dt_error_range_hz.min,
                                               config_.dt_error_range_hz.max);
  tasks_.assign(n, {});
  dt_errors_.assign(n, {});
  for (int v = 0; v < n; ++v) {
    for (int i = 0; i < k; ++i) {
      tasks_[v].push_back({size(rng_), config_.cycles_per_byte, config_.deadline_s});
    }
    for (int i = 0; i < k; ++i) {
      dt_errors_[v].push_back(config_.dt_error_mode == DtErrorMode::fixed
                                  ? config_.dt_error_fixed_hz
                                  : error(rng_));
    }
  }
}

void VecEnvironment::build_observations() {
  observations_.resize(vehicles_.size());
  for (std::size_t v = 0; v < vehicles_.size(); ++v) {
    auto& o = observations_[v];
    o.tasks = tasks_[v];
    o.dt_error_hz = dt_errors_[v];
    o.position_m = vehicles_[v].position_m;
    o.gain = channel_.gain[v];
  }
}

const std::vector<AgentObservation>& VecEnvironment::reset(std::uint64_t seed) {
  rng_.seed(seed);
  vehicles_ = spawn_fleet(config_, rng_);
  channel_ = init_channel(vehicles_, config_.bs_position_m, rng_);
  draw_tasks();
  build_observations();
  slot_ = 0;
  ready_ = true;
  return observations_;
}

std::vector<double> VecEnvironment::rates() const {
  std::vector<double> out;
  out.reserve(channel_.gain.size());
  for (double g : channel_.gain) {
    out.push_back(v2i_rate(config_.bandwidth_hz, config_.tx_power_w, g, config_.noise_power_w));
  }
  return out;
}

StepResult VecEnvironment::step(const JointAction& action) {
  if (!ready_) throw std::logic_error("VecEnvironment::step called before reset");
  const int n = config_.n_vehicles;
  const int k = config_.k_tasks;
  if (static_cast<int>(action.size()) != n) {
    throw std::invalid_argument("VecEnvironment::step: one action per vehicle required");
  }

  StepResult result;
  auto& out = result.outcome;
  out.vehicles.resize(n);
  const auto rate = rates();
  double demand = 0.0;
  for (int v = 0; v < n; ++v) {
    const auto& a = action[v];
    if (static_cast<int>(a.offload_ratio.size()) != k ||
        static_cast<int>(a.dt_alloc_hz.size()) != k) {
      throw std::invalid_argument("VecEnvironment::step: action must carry K entries");
    }
    auto& vo = out.vehicles[v];
    vo.rate_bps = rate[v];
    std::vector<DelayBreakdown> delays;
    for (int i = 0; i < k; ++i) {
      TaskRecord rec;
      rec.task = tasks_[v][i];
      rec.dt_error_hz = dt_errors_[v][i];
      rec.offload_ratio = a.offload_ratio[i];
      rec.dt_alloc_hz = a.dt_alloc_hz[i];
      rec.delay = task_delay(rec.task, {rec.offload_ratio, rec.dt_alloc_hz}, rate[v],
                             rec.dt_error_hz, config_.f_local_hz, config_.epsilon_hz);
      if (!(rec.delay.t_exe_s <= rec.task.deadline_s)) ++vo.deadline_violations;
      if (rec.delay.clamped) ++out.clamp_events;
      out.allocated_hz += rec.dt_alloc_hz;
      demand += rec.dt_alloc_hz + rec.dt_error_hz;
      delays.push_back(rec.delay);
      vo.tasks.push_back(rec);
    }
    vo.total_delay_s = vehicle_total_delay(delays);
    vo.reward = reward(vo.tasks, config_);
    result.rewards.push_back(vo.reward);
  }
  out.capacity_overflow_hz = std::max(0.0, demand - config_.f_server_hz);

  vehicles_ = advance_vehicles(std::move(vehicles_), config_.slot_duration_s, config_.road_length_m);
  channel_ = update_small_scale(channel_, vehicles_, config_.bs_position_m, rng_,
                                config_.fading_mode, config_.fading_corr, config_.path_loss_exp);
  draw_tasks();
  build_observations();
  ++slot_;
  result.observations = observations_;
  return result;
}

void write_trace_header(std::ostream& os) {
  os << "slot,vehicle,task,size_bytes,offload_ratio,dt_alloc_hz,dt_error_hz,t_local_s,t_tx_s,"
        "t_edge_compute_s,dt_bias_s,t_edge_s,t_exe_s,total_delay_s,reward,deadline_violations\n";
}

void write_trace_rows(std::ostream& os, long slot, const SlotOutcome& outcome) {
  for (std::size_t v = 0; v < outcome.vehicles.size(); ++v) {
    const auto& vo = outcome.vehicles[v];
    for (std::size_t i = 0; i < vo.tasks.size(); ++i) {
      const auto& t = vo.tasks[i];
      fmt::print(os, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", slot, v, i,
                 t.task.size_bytes, t.offload_ratio, t.dt_alloc_hz, t.dt_error_hz,
                 t.delay.t_local_s, t.delay.t_tx_s, t.delay.t_edge_compute_s, t.delay.dt_bias_s,
                 t.delay.t_edge_s, t.delay.t_exe_s, vo.total_delay_s, vo.reward,
                 vo.deadline_violations);
    }
  }
}

void write_channel_header(std::ostream& os) {
  os << "slot,vehicle,x_m,y_m,small_scale_re,small_scale_im,large_scale,gain,rate_bps\n";
}

void write_channel_rows(std::ostream& os, long slot, const VecEnvironment& env) {
  const auto rate = env.rates();
  const auto& ch = env.channel();
  for (std::size_t v = 0; v < env.vehicles().size(); ++v) {
    const auto& p = env.vehicles()[v].position_m;
    fmt::print(os, "{},{},{},{},{},{},{},{},{}\n", slot, v, p.x(), p.y(), ch.small_scale[v].real(),
               ch.small_scale[v].imag(), ch.large_scale[v], ch.gain[v], rate[v]);
  }
}

}  // namespace dtvec
