#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtvec/compute_delay.hpp"
#include "dtvec/scenario.hpp"

namespace dtvec {

struct P1Vehicle {
  std::vector<Task> tasks;
  std::vector<double> dt_error_hz;  // one per task
  double rate_bps = 0.0;
};

// Single-slot decision context.
struct P1Instance {
  std::vector<P1Vehicle> vehicles;
  double f_local_hz = 5e9;
  double f_server_hz = 100e9;
  double epsilon_hz = kDefaultEpsilonHz;
};

// Discretization for exhaustive search. Both grids must be non-empty and
// sorted ascending; ratios in [0, 1], allocations > 0.
struct GridSpec {
  std::vector<double> omega_grid;
  std::vector<double> alloc_grid_hz;
};

// Ratios {0, 0.1, ..., 1}; `alloc_points` evenly spaced allocations on
// [f_alloc_min, f_alloc_max].
GridSpec default_grid(double f_alloc_min_hz, double f_alloc_max_hz, int alloc_points = 10);
GridSpec default_grid(const ScenarioConfig& config);

void validate(const GridSpec& grid);

inline constexpr long long kDefaultOracleBudget = 10'000'000;

// Thrown when the enumeration would exceed the budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(long double required, long long budget);
  long double required() const { return required_; }

 private:
  long double required_;
};

struct OracleResult {
  bool feasible = false;
  std::vector<std::vector<OffloadDecision>> decisions;  // [vehicle][task]
  std::vector<double> total_delay_s;                     // per vehicle
  double aggregate_alloc_hz = 0.0;
  bool joint_search = false;  // true when server capacity forced a joint search
  long long evaluations = 0;
};

// Exact minimizer of each vehicle's max-over-tasks delay over the grid
// product, excluding points that break a deadline or the server capacity.
// Vehicles are solved independently; if their optima together exceed the
// capacity, the joint grid is searched for the minimum sum of vehicle delays.
// Ties go to the smaller aggregate allocation, then to lexicographically
// smaller ratios, then smaller allocations.
OracleResult brute_force_p1(const P1Instance& instance, const GridSpec& grid,
                            long long budget = kDefaultOracleBudget);

// Instance files use the INI layout of the run configuration:
//   [instance] f_local_hz, f_server_hz, epsilon_hz
//   [grid]     omega, alloc_hz (lists) or f_alloc_min_hz, f_alloc_max_hz, alloc_points
//   [vehicle<i>] rate_bps, size_bytes, cycles_per_byte, deadline_s, dt_error_hz (one entry per task)
struct P1Problem {
  P1Instance instance;
  GridSpec grid;
};

P1Problem parse_p1_problem(const std::string& text);
P1Problem load_p1_problem(const std::filesystem::path& path);

// CSV: vehicle,task,offload_ratio,dt_alloc_hz,total_delay_s
void write_oracle_csv(std::ostream& os, const OracleResult& result);

}  // namespace dtvec
