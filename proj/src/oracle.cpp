#include "dtvec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dtvec/config_io.hpp"

namespace dtvec {

GridSpec default_grid(double f_alloc_min_hz, double f_alloc_max_hz, int alloc_points) {
  GridSpec g;
  for (int i = 0; i <= 10; ++i) g.omega_grid.push_back(i / 10.0);
  if (alloc_points <= 1 || f_alloc_max_hz == f_alloc_min_hz) {
    g.alloc_grid_hz.push_back(f_alloc_max_hz);
  } else {
    for (int i = 0; i < alloc_points; ++i) {
      g.alloc_grid_hz.push_back(f_alloc_min_hz +
                                (f_alloc_max_hz - f_alloc_min_hz) * i / (alloc_points - 1));
    }
  }
  return g;
}

GridSpec default_grid(const ScenarioConfig& config) {
  return default_grid(config.f_alloc_min_hz, config.f_alloc_max_hz);
}

void validate(const GridSpec& grid) {
  if (grid.omega_grid.empty()) throw ConfigError("omega", "grid must not be empty");
  if (grid.alloc_grid_hz.empty()) throw ConfigError("alloc_hz", "grid must not be empty");
  if (!std::is_sorted(grid.omega_grid.begin(), grid.omega_grid.end())) {
    throw ConfigError("omega", "grid must be sorted ascending");
  }
  if (!std::is_sorted(grid.alloc_grid_hz.begin(), grid.alloc_grid_hz.end())) {
    throw ConfigError("alloc_hz", "grid must be sorted ascending");
  }
  if (grid.omega_grid.front() < 0.0 || grid.omega_grid.back() > 1.0) {
    throw ConfigError("omega", "ratios must lie in [0, 1]");
  }
  if (!(grid.alloc_grid_hz.front() > 0.0)) throw ConfigError("alloc_hz", "allocations must be > 0");
}

BudgetExceeded::BudgetExceeded(long double required, long long budget)
    : std::runtime_error(fmt::format("oracle enumeration needs {:.4g} evaluations, budget is {}",
                                     static_cast<double>(required), budget)),
      required_(required) {}

namespace {

struct Candidate {
  double delay = std::numeric_limits<double>::infinity();
  double agg = 0.0;
  double demand = 0.0;
  std::vector<int> w_idx;
  std::vector<int> f_idx;
};

// Strict "a preferred over b" under the documented tie-break order.
bool preferred(double delay_a, double agg_a, const std::vector<int>& wa, const std::vector<int>& fa,
               double delay_b, double agg_b, const std::vector<int>& wb, const std::vector<int>& fb) {
  if (delay_a != delay_b) return delay_a < delay_b;
  if (agg_a != agg_b) return agg_a < agg_b;
  if (wa != wb) return wa < wb;
  return fa < fb;
}

// t_exe for every (ratio, allocation) pair of one task; NaN marks infeasible.
std::vector<double> task_table(const Task& task, double dt_error, double rate,
                               const P1Instance& inst, const GridSpec& grid) {
  const std::size_t nf = grid.alloc_grid_hz.size();
  std::vector<double> table(grid.omega_grid.size() * nf);
  for (std::size_t wi = 0; wi < grid.omega_grid.size(); ++wi) {
    for (std::size_t fi = 0; fi < nf; ++fi) {
      DelayBreakdown b = task_delay(task, {grid.omega_grid[wi], grid.alloc_grid_hz[fi]}, rate,
                                    dt_error, inst.f_local_hz, inst.epsilon_hz);
      bool ok = b.feasible && std::isfinite(b.t_exe_s) && b.t_exe_s <= task.deadline_s;
      table[wi * nf + fi] = ok ? b.t_exe_s : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return table;
}

// Enumerates every grid tuple of one vehicle; calls visit(candidate) for the
// feasible ones.
template <typename Visit>
long long enumerate_vehicle(const P1Vehicle& v, const P1Instance& inst, const GridSpec& grid,
                            Visit&& visit) {
  const int k = static_cast<int>(v.tasks.size());
  const int nf = static_cast<int>(grid.alloc_grid_hz.size());
  const int per_task = static_cast<int>(grid.omega_grid.size()) * nf;
  std::vector<std::vector<double>> tables;
  for (int i = 0; i < k; ++i) {
    tables.push_back(task_table(v.tasks[i], v.dt_error_hz[i], v.rate_bps, inst, grid));
  }
  double error_sum = 0.0;
  for (double e : v.dt_error_hz) error_sum += e;

  std::vector<int> idx(k, 0);
  Candidate c;
  c.w_idx.resize(k);
  c.f_idx.resize(k);
  long long count = 0;
  while (true) {
    ++count;
    bool ok = true;
    double delay = 0.0, agg = 0.0;
    for (int i = 0; i < k && ok; ++i) {
      double t = tables[i][idx[i]];
      if (std::isnan(t)) {
        ok = false;
      } else {
        delay = std::max(delay, t);
        c.w_idx[i] = idx[i] / nf;
        c.f_idx[i] = idx[i] % nf;
        agg += grid.alloc_grid_hz[c.f_idx[i]];
      }
    }
    if (ok && agg + error_sum <= inst.f_server_hz) {
      c.delay = delay;
      c.agg = agg;
      c.demand = agg + error_sum;
      visit(c);
    }
    int pos = k - 1;
    while (pos >= 0 && ++idx[pos] == per_task) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return count;
}

std::vector<OffloadDecision> to_decisions(const Candidate& c, const GridSpec& grid) {
  std::vector<OffloadDecision> out;
  for (std::size_t i = 0; i < c.w_idx.size(); ++i) {
    out.push_back({grid.omega_grid[c.w_idx[i]], grid.alloc_grid_hz[c.f_idx[i]]});
  }
  return out;
}

}  // namespace

OracleResult brute_force_p1(const P1Instance& inst, const GridSpec& grid, long long budget) {
  validate(grid);
  for (const auto& v : inst.vehicles) {
    if (v.tasks.empty() || v.dt_error_hz.size() != v.tasks.size()) {
      throw std::invalid_argument("brute_force_p1: each vehicle needs tasks and one error per task");
    }
  }
  const long double per_task =
      static_cast<long double>(grid.omega_grid.size()) * grid.alloc_grid_hz.size();
  long double independent = 0.0L;
  int total_tasks = 0;
  for (const auto& v : inst.vehicles) {
    independent += std::pow(per_task, static_cast<long double>(v.tasks.size()));
    total_tasks += static_cast<int>(v.tasks.size());
  }
  if (independent > static_cast<long double>(budget)) throw BudgetExceeded(independent, budget);

  OracleResult result;
  std::vector<Candidate> best(inst.vehicles.size());
  double demand = 0.0;
  for (std::size_t n = 0; n < inst.vehicles.size(); ++n) {
    bool found = false;
    result.evaluations += enumerate_vehicle(inst.vehicles[n], inst, grid, [&](const Candidate& c) {
      if (!found || preferred(c.delay, c.agg, c.w_idx, c.f_idx, best[n].delay, best[n].agg,
                              best[n].w_idx, best[n].f_idx)) {
        best[n] = c;
        found = true;
      }
    });
    if (!found) return result;  // infeasible
    demand += best[n].demand;
  }

  if (demand > inst.f_server_hz) {
    const long double joint = std::pow(per_task, static_cast<long double>(total_tasks));
    if (joint > static_cast<long double>(budget)) throw BudgetExceeded(joint, budget);
    result.joint_search = true;

    std::vector<std::vector<Candidate>> options(inst.vehicles.size());
    for (std::size_t n = 0; n < inst.vehicles.size(); ++n) {
      enumerate_vehicle(inst.vehicles[n], inst, grid,
                        [&](const Candidate& c) { options[n].push_back(c); });
    }
    std::vector<std::size_t> pick(options.size(), 0);
    bool found = false;
    double best_sum = 0.0, best_agg = 0.0;
    std::vector<int> best_w, best_f, w, f;
    std::vector<std::size_t> best_pick;
    while (true) {
      ++result.evaluations;
      double sum = 0.0, agg = 0.0, dem = 0.0;
      w.clear();
      f.clear();
      for (std::size_t n = 0; n < options.size(); ++n) {
        const Candidate& c = options[n][pick[n]];
        sum += c.delay;
        agg += c.agg;
        dem += c.demand;
        w.insert(w.end(), c.w_idx.begin(), c.w_idx.end());
        f.insert(f.end(), c.f_idx.begin(), c.f_idx.end());
      }
      if (dem <= inst.f_server_hz &&
          (!found || preferred(sum, agg, w, f, best_sum, best_agg, best_w, best_f))) {
        found = true;
        best_sum = sum;
        best_agg = agg;
        best_w = w;
        best_f = f;
        best_pick = pick;
      }
      int pos = static_cast<int>(options.size()) - 1;
      while (pos >= 0 && ++pick[pos] == options[pos].size()) pick[pos--] = 0;
      if (pos < 0) break;
    }
    if (!found) return result;
    for (std::size_t n = 0; n < options.size(); ++n) best[n] = options[n][best_pick[n]];
  }

  result.feasible = true;
  for (const auto& c : best) {
    result.decisions.push_back(to_decisions(c, grid));
    result.total_delay_s.push_back(c.delay);
    result.aggregate_alloc_hz += c.agg;
  }
  return result;
}

namespace pt = boost::property_tree;

P1Problem parse_p1_problem(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("instance", e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  P1Problem p;
  auto get = [](const pt::ptree& sec, const char* key) -> std::string {
    auto v = sec.get_optional<std::string>(key);
    if (!v) throw ConfigError(key, "missing required key");
    return *v;
  };

  if (auto inst = tree.get_child_optional("instance")) {
    if (auto v = inst->get_optional<std::string>("f_local_hz")) p.instance.f_local_hz = parse_double("f_local_hz", *v);
    if (auto v = inst->get_optional<std::string>("f_server_hz")) p.instance.f_server_hz = parse_double("f_server_hz", *v);
    if (auto v = inst->get_optional<std::string>("epsilon_hz")) p.instance.epsilon_hz = parse_double("epsilon_hz", *v);
  }

  double f_min = 1e9, f_max = 20e9;
  int points = 10;
  GridSpec grid = default_grid(f_min, f_max, points);
  if (auto g = tree.get_child_optional("grid")) {
    if (auto v = g->get_optional<std::string>("f_alloc_min_hz")) f_min = parse_double("f_alloc_min_hz", *v);
    if (auto v = g->get_optional<std::string>("f_alloc_max_hz")) f_max = parse_double("f_alloc_max_hz", *v);
    if (auto v = g->get_optional<std::string>("alloc_points")) points = static_cast<int>(parse_double("alloc_points", *v));
    grid = default_grid(f_min, f_max, points);
    if (auto v = g->get_optional<std::string>("omega")) grid.omega_grid = parse_double_list("omega", *v);
    if (auto v = g->get_optional<std::string>("alloc_hz")) grid.alloc_grid_hz = parse_double_list("alloc_hz", *v);
  }
  validate(grid);
  p.grid = grid;

  for (const auto& [name, sec] : tree) {
    if (name == "instance" || name == "grid") continue;
    if (name.rfind("vehicle", 0) != 0) throw ConfigError(name, "unknown section");
    P1Vehicle v;
    v.rate_bps = parse_double("rate_bps", get(sec, "rate_bps"));
    auto sizes = parse_double_list("size_bytes", get(sec, "size_bytes"));
    auto cycles = parse_double_list("cycles_per_byte", get(sec, "cycles_per_byte"));
    auto deadlines = parse_double_list("deadline_s", get(sec, "deadline_s"));
    auto errors = parse_double_list("dt_error_hz", get(sec, "dt_error_hz"));
    const std::size_t k = sizes.size();
    auto expand = [&](std::vector<double>& xs, const char* field) {
      if (xs.size() == 1 && k > 1) xs.assign(k, xs.front());
      if (xs.size() != k) throw ConfigError(field, "needs one entry per task (or a single value)");
    };
    expand(cycles, "cycles_per_byte");
    expand(deadlines, "deadline_s");
    expand(errors, "dt_error_hz");
    for (std::size_t i = 0; i < k; ++i) {
      if (!(sizes[i] > 0 && cycles[i] > 0 && deadlines[i] > 0)) {
        throw ConfigError(name, "task sizes, cycles and deadlines must be > 0");
      }
      v.tasks.push_back({sizes[i], cycles[i], deadlines[i]});
    }
    v.dt_error_hz = errors;
    p.instance.vehicles.push_back(std::move(v));
  }
  if (p.instance.vehicles.empty()) throw ConfigError("vehicle", "instance has no [vehicle...] section");
  return p;
}

P1Problem load_p1_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("instance", "cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_p1_problem(ss.str());
}

void write_oracle_csv(std::ostream& os, const OracleResult& result) {
  os << "vehicle,task,offload_ratio,dt_alloc_hz,total_delay_s\n";
  for (std::size_t n = 0; n < result.decisions.size(); ++n) {
    for (std::size_t k = 0; k < result.decisions[n].size(); ++k) {
      fmt::print(os, "{},{},{},{},{}\n", n, k, result.decisions[n][k].offload_ratio,
                 result.decisions[n][k].dt_alloc_hz, result.total_delay_s[n]);
    }
  }
}

}  // namespace dtvec
