// Command-line front end: training, evaluation, experiment sweeps, the
// single-slot oracle and config validation.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dtvec/config_io.hpp"
#include "dtvec/experiment.hpp"
#include "dtvec/oracle.hpp"

namespace {

using namespace dtvec;

struct ConfigFlags {
  std::string path;
  std::vector<std::string> overrides;
  std::optional<int> episodes;
  std::optional<int> steps;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f, bool training) {
  cmd->add_option("-c,--config", f.path, "INI run configuration (defaults when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", f.overrides, "Override one field, key=value (repeatable)");
  if (training) {
    cmd->add_option("--episodes", f.episodes, "Training episodes");
    cmd->add_option("--steps", f.steps, "Slots per episode");
  }
}

RunConfig build_config(const ConfigFlags& f, const RunConfig& base) {
  RunConfig cfg = f.path.empty() ? base : load_config(f.path, base);
  for (const auto& o : f.overrides) apply_override(cfg, o);
  if (f.episodes) apply_override(cfg, "episodes", std::to_string(*f.episodes));
  if (f.steps) apply_override(cfg, "steps_per_episode", std::to_string(*f.steps));
  validate(cfg.scenario);
  validate(cfg.train);
  return cfg;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError("seeds", "'" + item + "' is not a non-negative integer");
    }
    seeds.push_back(v);
    start = end + 1;
  }
  return seeds;
}

void print_history_tail(const std::vector<EpisodeMetrics>& history) {
  if (history.empty()) return;
  const auto& m = history.back();
  fmt::print("episodes: {}  final reward: {:.4f}  delay: {:.6f} s  resources: {:.3f} GHz\n",
             history.size(), m.mean_reward, m.mean_total_delay, m.resource_usage_ghz);
}

void print_sweep(const SweepResult& r, const std::string& value_name, double scale) {
  for (const auto& p : r.summary) {
    fmt::print("{:<7} {}={:<8g} resources {:9.4f} GHz  delay {:.6e} s  reward {:.4f}\n",
               p.algorithm, value_name, p.value * scale, p.resource_usage_ghz,
               p.mean_total_delay, p.mean_reward);
  }
  fmt::print("wrote {}\n", r.csv.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital-twin vehicular edge computing: MARL offloading experiments"};
  app.set_version_flag("--version", std::string(DTVEC_VERSION));
  app.require_subcommand(1);

  // validate-config
  ConfigFlags vc_flags;
  bool vc_print = false;
  auto* vc = app.add_subcommand("validate-config", "Check a configuration file and overrides");
  add_config_flags(vc, vc_flags, false);
  vc->add_flag("--print", vc_print, "Print the effective configuration");

  // train
  ConfigFlags tr_flags;
  std::string tr_algorithm = "marl";
  std::uint64_t tr_seed = 0;
  std::string tr_out = "runs/train";
  auto* tr = app.add_subcommand("train", "Train one algorithm for one seed");
  add_config_flags(tr, tr_flags, true);
  tr->add_option("-a,--algorithm", tr_algorithm, "marl or shared")
      ->check(CLI::IsMember({"marl", "shared"}));
  tr->add_option("-s,--seed", tr_seed, "Seed for the scenario and the trainer");
  tr->add_option("-o,--out", tr_out, "Output directory");

  // evaluate
  std::string ev_checkpoint;
  int ev_episodes = 10;
  std::uint64_t ev_seed = 0;
  std::string ev_out = "runs/evaluate";
  auto* ev = app.add_subcommand("evaluate", "Evaluate a saved checkpoint");
  ev->add_option("checkpoint", ev_checkpoint, "Checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  ev->add_option("--episodes", ev_episodes, "Evaluation episodes");
  ev->add_option("-s,--seed", ev_seed, "Evaluation seed");
  ev->add_option("-o,--out", ev_out, "Output directory");
  bool ev_trace = false;
  ev->add_flag("--trace", ev_trace, "Also write per-slot and channel traces of the first episode");

  // sweep
  ConfigFlags sw_flags;
  std::string sw_variable = "none";
  std::string sw_values;
  std::string sw_seeds = "0,1,2";
  std::string sw_out = "runs/sweep";
  std::string sw_checkpoint;
  std::string sw_checkpoint_dir;
  int sw_eval_episodes = 10;
  bool sw_reuse = false;
  bool sw_no_plots = false;
  auto* sw = app.add_subcommand(
      "sweep",
      "Run an experiment: none = reward convergence of MARL vs shared, n_vehicles = resource "
      "usage sweep, dt_error_fixed = delay vs twin error");
  add_config_flags(sw, sw_flags, true);
  sw->add_option("-v,--variable", sw_variable, "none, n_vehicles or dt_error_fixed")
      ->check(CLI::IsMember({"none", "n_vehicles", "dt_error_fixed"}));
  sw->add_option("--values", sw_values,
                 "Comma-separated sweep values (vehicle counts, or twin errors in Hz)");
  sw->add_option("--seeds", sw_seeds, "Comma-separated seeds");
  sw->add_option("-o,--out", sw_out, "Output directory");
  sw->add_option("--eval-episodes", sw_eval_episodes, "Evaluation episodes per point");
  sw->add_option("--checkpoint", sw_checkpoint, "dt_error_fixed: MARL checkpoint to evaluate")
      ->check(CLI::ExistingFile);
  sw->add_option("--checkpoint-dir", sw_checkpoint_dir,
                 "Directory searched for reusable checkpoints (default <out>/checkpoints)");
  sw->add_flag("--reuse-checkpoints", sw_reuse, "Load matching checkpoints instead of training");
  sw->add_flag("--no-plots", sw_no_plots, "Skip PNG output");

  // oracle
  std::string or_instance;
  long long or_budget = kDefaultOracleBudget;
  std::string or_csv;
  auto* orc = app.add_subcommand("oracle", "Solve a single-slot instance by exhaustive search");
  orc->add_option("instance", or_instance, "Instance file")->required()->check(CLI::ExistingFile);
  orc->add_option("--budget", or_budget, "Maximum number of grid evaluations");
  orc->add_option("--csv", or_csv, "Also write the decisions as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*vc) {
      const RunConfig cfg = build_config(vc_flags, RunConfig{});
      if (vc_print) std::cout << to_ini(cfg);
      fmt::print(vc_print ? stderr : stdout, "configuration ok (hash {:016x})\n", config_hash(cfg));
    } else if (*tr) {
      const RunConfig cfg = build_config(tr_flags, experiment_defaults());
      const auto out = run_training(cfg, tr_algorithm, tr_seed, tr_out);
      print_history_tail(out.history);
      fmt::print("wrote {}\nwrote {}\n", out.csv.string(), out.checkpoint.string());
    } else if (*ev) {
      const auto r = run_evaluation(ev_checkpoint, ev_episodes, ev_seed, ev_out, ev_trace);
      fmt::print("episodes: {}  mean reward: {:.4f}  delay: {:.6e} s  resources: {:.3f} GHz  "
                 "violations/slot: {:.4f}\n",
                 ev_episodes, r.mean_reward, r.mean_total_delay, r.resource_usage_ghz,
                 r.violations_per_slot);
    } else if (*sw) {
      ExperimentSpec spec;
      spec.name = sw_variable;
      spec.config = build_config(sw_flags, experiment_defaults());
      spec.seeds = parse_seeds(sw_seeds);
      spec.sweep = parse_sweep_variable(sw_variable);
      if (!sw_values.empty()) spec.values = parse_double_list("values", sw_values);
      spec.out_dir = sw_out;
      spec.eval_episodes = sw_eval_episodes;
      spec.plots = !sw_no_plots;
      spec.reuse_checkpoints = sw_reuse;
      spec.checkpoint_dir = sw_checkpoint_dir;
      spec.policy_checkpoint = sw_checkpoint;
      switch (spec.sweep) {
        case SweepVariable::none: {
          if (!spec.values.empty()) throw ConfigError("values", "not used without a sweep variable");
          const auto r = run_convergence(spec);
          for (const auto& run : r.runs) {
            fmt::print("seed {}: marl final {:.4f}  shared final {:.4f}  random {:.4f}\n",
                       run.seed, run.marl.back().mean_reward, run.shared.back().mean_reward,
                       run.random.mean_reward);
          }
          fmt::print("wrote {}\n", r.csv.string());
          break;
        }
        case SweepVariable::n_vehicles: {
          const auto r = run_resource_sweep(spec);
          print_sweep(r, "N", 1.0);
          const auto trend = resource_trend(r);
          for (const auto& note : trend.notes) fmt::print("note: {}\n", note);
          break;
        }
        case SweepVariable::dt_error_fixed:
          print_sweep(run_dt_error_sweep(spec), "dt_error_ghz", 1e-9);
          break;
      }
    } else if (*orc) {
      const P1Problem problem = load_p1_problem(or_instance);
      const OracleResult r = brute_force_p1(problem.instance, problem.grid, or_budget);
      if (!r.feasible) {
        fmt::print("infeasible: no grid point meets every deadline and the server capacity\n");
        return 3;
      }
      for (std::size_t v = 0; v < r.decisions.size(); ++v) {
        for (std::size_t k = 0; k < r.decisions[v].size(); ++k) {
          const auto& d = r.decisions[v][k];
          fmt::print("vehicle {} task {}: omega={:g} f_alloc={:g} GHz\n", v, k, d.offload_ratio,
                     d.dt_alloc_hz * 1e-9);
        }
        fmt::print("vehicle {} delay={:.6e} s\n", v, r.total_delay_s[v]);
      }
      fmt::print("evaluations: {}{}\n", r.evaluations, r.joint_search ? " (joint search)" : "");
      if (!or_csv.empty()) {
        std::ofstream out(or_csv, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + or_csv + "'");
        write_oracle_csv(out, r);
      }
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: invalid field '{}': {}\n", e.field(), e.what());
    return 2;
  } catch (const BudgetExceeded& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
