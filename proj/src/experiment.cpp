#include "dtvec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "dtvec/checkpoint.hpp"
#include "dtvec/plot.hpp"

namespace dtvec {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMetricsHeader =
    "algorithm,seed,episode,mean_reward,agent_rewards,mean_total_delay_s,resource_usage_ghz,"
    "violations,critic_loss,actor_loss\n";

std::ofstream open_csv(const fs::path& path, const char* header) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << header;
  return out;
}

void write_metrics_row(std::ostream& out, const std::string& algorithm, std::uint64_t seed,
                       const EpisodeMetrics& m) {
  std::string per_agent;
  for (double r : m.mean_reward_per_agent) {
    if (!per_agent.empty()) per_agent += ';';
    per_agent += format_double(r);
  }
  out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", algorithm, seed, m.episode,
                     format_double(m.mean_reward), per_agent, format_double(m.mean_total_delay),
                     format_double(m.resource_usage_ghz), m.violations,
                     format_double(m.critic_loss), format_double(m.actor_loss));
  out.flush();
}

fs::path checkpoint_dir_of(const ExperimentSpec& spec) {
  return spec.checkpoint_dir.empty() ? spec.out_dir / "checkpoints" : spec.checkpoint_dir;
}

RunConfig with_vehicles(const RunConfig& base, int n) {
  RunConfig cfg = base;
  cfg.scenario.n_vehicles = n;
  validate(cfg.scenario);
  return cfg;
}

MarlModel obtain_marl(const ExperimentSpec& spec, const RunConfig& cfg, std::uint64_t seed) {
  const fs::path path = checkpoint_dir_of(spec) /
                        checkpoint_name("marl", cfg.scenario.n_vehicles, seed);
  if (spec.reuse_checkpoints && fs::exists(path)) {
    auto loaded = load_checkpoint(path);
    if (loaded.marl && RunConfig{loaded.marl->scenario, loaded.marl->train} == cfg) {
      return std::move(*loaded.marl);
    }
  }
  VecEnvironment env(cfg.scenario);
  auto result = train(env, cfg.train);
  save_checkpoint(spec.out_dir / "checkpoints" /
                      checkpoint_name("marl", cfg.scenario.n_vehicles, seed),
                  result.model, result.rng_state);
  return std::move(result.model);
}

SharedModel obtain_shared(const ExperimentSpec& spec, const RunConfig& cfg, std::uint64_t seed) {
  const fs::path path = checkpoint_dir_of(spec) /
                        checkpoint_name("shared", cfg.scenario.n_vehicles, seed);
  if (spec.reuse_checkpoints && fs::exists(path)) {
    auto loaded = load_checkpoint(path);
    if (loaded.shared && RunConfig{loaded.shared->scenario, loaded.shared->train} == cfg) {
      return std::move(*loaded.shared);
    }
  }
  VecEnvironment env(cfg.scenario);
  auto result = shared_baseline_train(env, cfg.train);
  save_checkpoint(spec.out_dir / "checkpoints" /
                      checkpoint_name("shared", cfg.scenario.n_vehicles, seed),
                  result.model, result.rng_state);
  return std::move(result.model);
}

std::vector<SweepPoint> summarize(const std::vector<SweepRow>& rows) {
  std::vector<SweepPoint> out;
  std::vector<int> counts;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SweepPoint& p) {
      return p.algorithm == r.algorithm && p.value == r.value;
    });
    if (it == out.end()) {
      out.push_back({r.algorithm, r.value, 0.0, 0.0, 0.0});
      counts.push_back(0);
      it = out.end() - 1;
    }
    const auto i = static_cast<std::size_t>(it - out.begin());
    it->resource_usage_ghz += r.eval.resource_usage_ghz;
    it->mean_total_delay += r.eval.mean_total_delay;
    it->mean_reward += r.eval.mean_reward;
    ++counts[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].resource_usage_ghz /= counts[i];
    out[i].mean_total_delay /= counts[i];
    out[i].mean_reward /= counts[i];
  }
  std::stable_sort(out.begin(), out.end(), [](const SweepPoint& a, const SweepPoint& b) {
    return a.algorithm < b.algorithm;
  });
  return out;
}

void write_sweep_csvs(SweepResult& result, const ExperimentSpec& spec, const std::string& stem,
                      const std::string& value_column) {
  result.csv = spec.out_dir / (stem + ".csv");
  {
    const std::string header = fmt::format(
        "algorithm,{},seed,resource_usage_ghz,mean_total_delay_s,mean_reward,"
        "violations_per_slot\n",
        value_column);
    auto out = open_csv(result.csv, header.c_str());
    for (const auto& r : result.rows) {
      out << fmt::format("{},{},{},{},{},{},{}\n", r.algorithm, format_double(r.value), r.seed,
                         format_double(r.eval.resource_usage_ghz),
                         format_double(r.eval.mean_total_delay),
                         format_double(r.eval.mean_reward),
                         format_double(r.eval.violations_per_slot));
    }
  }
  write_metadata(result.csv, stem, spec.config, spec.seeds);

  result.summary_csv = spec.out_dir / (stem + "_summary.csv");
  {
    const std::string header = fmt::format(
        "algorithm,{},resource_usage_ghz,mean_total_delay_s,mean_reward\n", value_column);
    auto out = open_csv(result.summary_csv, header.c_str());
    for (const auto& p : result.summary) {
      out << fmt::format("{},{},{},{},{}\n", p.algorithm, format_double(p.value),
                         format_double(p.resource_usage_ghz), format_double(p.mean_total_delay),
                         format_double(p.mean_reward));
    }
  }
  write_metadata(result.summary_csv, stem, spec.config, spec.seeds);
}

std::vector<PlotSeries> summary_series(const std::vector<SweepPoint>& summary, double x_scale,
                                       double (*y)(const SweepPoint&)) {
  std::vector<PlotSeries> series;
  for (const auto& p : summary) {
    if (series.empty() || series.back().label != p.algorithm) series.push_back({p.algorithm, {}, {}});
    series.back().x.push_back(p.value * x_scale);
    series.back().y.push_back(y(p));
  }
  return series;
}

}  // namespace

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::none: return "none";
    case SweepVariable::n_vehicles: return "n_vehicles";
    case SweepVariable::dt_error_fixed: return "dt_error_fixed";
  }
  return "none";
}

SweepVariable parse_sweep_variable(const std::string& text) {
  if (text == "none") return SweepVariable::none;
  if (text == "n_vehicles") return SweepVariable::n_vehicles;
  if (text == "dt_error_fixed") return SweepVariable::dt_error_fixed;
  throw ConfigError("sweep", "unknown sweep variable '" + text +
                                 "' (expected none, n_vehicles or dt_error_fixed)");
}

RunConfig experiment_defaults() {
  RunConfig cfg;
  cfg.scenario.dt_error_mode = DtErrorMode::fixed;
  cfg.scenario.dt_error_fixed_hz = 0.2e9;
  return cfg;
}

RunConfig seeded(const RunConfig& config, std::uint64_t seed) {
  RunConfig cfg = config;
  cfg.scenario.seed = seed;
  cfg.train.seed = seed;
  return cfg;
}

void validate(const ExperimentSpec& spec) {
  if (spec.name.empty()) throw ConfigError("name", "must not be empty");
  if (spec.seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  if (spec.eval_episodes < 1) throw ConfigError("eval_episodes", "must be >= 1");
  validate(spec.config.scenario);
  validate(spec.config.train);
  if (spec.sweep != SweepVariable::none && spec.values.empty()) {
    throw ConfigError("values", "a sweep needs at least one value");
  }
  for (double v : spec.values) {
    if (!std::isfinite(v)) throw ConfigError("values", "must be finite");
    ScenarioConfig s = spec.config.scenario;
    if (spec.sweep == SweepVariable::n_vehicles) {
      if (v < 1 || v != std::floor(v) || v > 1e6) {
        throw ConfigError("values", fmt::format("vehicle count {} is not a positive integer", v));
      }
      s.n_vehicles = static_cast<int>(v);
    } else if (spec.sweep == SweepVariable::dt_error_fixed) {
      s.dt_error_fixed_hz = v;
    }
    try {
      validate(s);
    } catch (const ConfigError& e) {
      throw ConfigError("values", fmt::format("{} is invalid ({})", format_double(v), e.what()));
    }
  }
}

std::string checkpoint_name(const std::string& algorithm, int n_vehicles, std::uint64_t seed) {
  return fmt::format("{}_n{}_seed{}.json", algorithm, n_vehicles, seed);
}

std::uint64_t eval_seed(std::uint64_t seed) { return derive_seed(seed, 0x5eed0e7a1ULL); }

std::vector<double> trailing_mean(const std::vector<double>& values, int window) {
  if (window < 1) throw std::invalid_argument("trailing_mean: window must be >= 1");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= static_cast<std::size_t>(window)) sum -= values[i - window];
    const std::size_t n = std::min<std::size_t>(i + 1, window);
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

void write_metadata(const fs::path& csv, const std::string& experiment, const RunConfig& config,
                    const std::vector<std::uint64_t>& seeds) {
  nlohmann::json meta;
  meta["file"] = csv.filename().string();
  meta["experiment"] = experiment;
  meta["config_hash"] = fmt::format("{:016x}", config_hash(config));
  meta["seeds"] = seeds;
  meta["version"] = DTVEC_VERSION;
  std::ofstream out(fs::path(csv.string() + ".meta.json"), std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write metadata for '" + csv.string() + "'");
  out << meta.dump(2) << '\n';
}

ConvergenceResult run_convergence(const ExperimentSpec& spec) {
  validate(spec);
  fs::create_directories(spec.out_dir);
  save_config(spec.out_dir / "config.ini", spec.config);

  ConvergenceResult result;
  result.csv = spec.out_dir / "convergence.csv";
  auto out = open_csv(result.csv, kMetricsHeader);
  write_metadata(result.csv, "convergence", spec.config, spec.seeds);

  for (std::uint64_t seed : spec.seeds) {
    const RunConfig cfg = seeded(spec.config, seed);
    SeedCurves curves;
    curves.seed = seed;
    VecEnvironment env(cfg.scenario);

    auto marl = train(env, cfg.train, [&](const EpisodeMetrics& m) {
      write_metrics_row(out, "marl", seed, m);
    });
    save_checkpoint(spec.out_dir / "checkpoints" /
                        checkpoint_name("marl", cfg.scenario.n_vehicles, seed),
                    marl.model, marl.rng_state);
    curves.marl = std::move(marl.history);
    result.marl_models.push_back(std::move(marl.model));

    auto shared = shared_baseline_train(env, cfg.train, [&](const EpisodeMetrics& m) {
      write_metrics_row(out, "shared", seed, m);
    });
    save_checkpoint(spec.out_dir / "checkpoints" /
                        checkpoint_name("shared", cfg.scenario.n_vehicles, seed),
                    shared.model, shared.rng_state);
    curves.shared = std::move(shared.history);
    result.shared_models.push_back(std::move(shared.model));

    curves.random = evaluate(cfg.scenario, random_policy(cfg.scenario), spec.eval_episodes,
                             cfg.train.steps_per_episode, eval_seed(seed));
    result.runs.push_back(std::move(curves));
  }
  out.close();

  const fs::path random_csv = spec.out_dir / "random_baseline.csv";
  {
    auto rout = open_csv(random_csv,
                         "seed,episodes,mean_reward,mean_total_delay_s,resource_usage_ghz,"
                         "violations_per_slot\n");
    for (const auto& run : result.runs) {
      rout << fmt::format("{},{},{},{},{},{}\n", run.seed, spec.eval_episodes,
                          format_double(run.random.mean_reward),
                          format_double(run.random.mean_total_delay),
                          format_double(run.random.resource_usage_ghz),
                          format_double(run.random.violations_per_slot));
    }
  }
  write_metadata(random_csv, "convergence", spec.config, spec.seeds);

  // Seed mean per episode, then trailing mean.
  const std::size_t episodes = static_cast<std::size_t>(spec.config.train.episodes);
  auto seed_mean = [&](bool marl) {
    std::vector<double> mean(episodes, 0.0);
    for (const auto& run : result.runs) {
      const auto& h = marl ? run.marl : run.shared;
      for (std::size_t e = 0; e < episodes && e < h.size(); ++e) mean[e] += h[e].mean_reward;
    }
    for (double& v : mean) v /= static_cast<double>(result.runs.size());
    return mean;
  };
  const auto marl_mean = seed_mean(true), shared_mean = seed_mean(false);
  const auto marl_smooth = trailing_mean(marl_mean, kSmoothingWindow);
  const auto shared_smooth = trailing_mean(shared_mean, kSmoothingWindow);

  result.smoothed_csv = spec.out_dir / "convergence_smoothed.csv";
  {
    auto sout = open_csv(result.smoothed_csv, "algorithm,episode,mean_reward,smoothed_reward\n");
    for (std::size_t e = 0; e < episodes; ++e) {
      sout << fmt::format("marl,{},{},{}\n", e, format_double(marl_mean[e]),
                          format_double(marl_smooth[e]));
    }
    for (std::size_t e = 0; e < episodes; ++e) {
      sout << fmt::format("shared,{},{},{}\n", e, format_double(shared_mean[e]),
                          format_double(shared_smooth[e]));
    }
  }
  write_metadata(result.smoothed_csv, "convergence", spec.config, spec.seeds);

  if (spec.plots) {
    std::vector<double> x(episodes);
    for (std::size_t e = 0; e < episodes; ++e) x[e] = static_cast<double>(e);
    double random_mean = 0.0;
    for (const auto& run : result.runs) random_mean += run.random.mean_reward;
    random_mean /= static_cast<double>(result.runs.size());
    result.plot = spec.out_dir / "convergence.png";
    write_line_plot(result.plot,
                    {{"MARL", x, marl_smooth},
                     {"shared", x, shared_smooth},
                     {"random", x, std::vector<double>(episodes, random_mean)}},
                    {"Average reward per agent", "episode", "reward", false, 800, 500});
  }
  return result;
}

SweepResult run_resource_sweep(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.sweep != SweepVariable::n_vehicles) {
    throw ConfigError("sweep", "resource sweep requires sweep = n_vehicles");
  }
  fs::create_directories(spec.out_dir);
  save_config(spec.out_dir / "config.ini", spec.config);

  SweepResult result;
  for (double v : spec.values) {
    const int n = static_cast<int>(v);
    for (std::uint64_t seed : spec.seeds) {
      const RunConfig cfg = with_vehicles(seeded(spec.config, seed), n);
      const int steps = cfg.train.steps_per_episode;
      {
        const MarlModel model = obtain_marl(spec, cfg, seed);
        result.rows.push_back({"marl", v, seed,
                               evaluate(cfg.scenario, marl_policy(model), spec.eval_episodes,
                                        steps, eval_seed(seed))});
      }
      {
        const SharedModel model = obtain_shared(spec, cfg, seed);
        result.rows.push_back({"shared", v, seed,
                               evaluate(cfg.scenario, shared_policy(model), spec.eval_episodes,
                                        steps, eval_seed(seed))});
      }
    }
  }
  result.summary = summarize(result.rows);
  write_sweep_csvs(result, spec, "resource_sweep", "n_vehicles");

  if (spec.plots) {
    result.plot = spec.out_dir / "resource_sweep.png";
    write_line_plot(result.plot,
                    summary_series(result.summary, 1.0,
                                   [](const SweepPoint& p) { return p.resource_usage_ghz; }),
                    {"Allocated edge resources", "vehicles", "GHz per slot", true, 800, 500});
  }
  return result;
}

SweepResult run_dt_error_sweep(const ExperimentSpec& spec) {
  validate(spec);
  if (!spec.policy_checkpoint.empty()) {
    auto loaded = load_checkpoint(spec.policy_checkpoint);
    if (!loaded.marl) {
      throw ConfigError("policy_checkpoint", "checkpoint does not hold a MARL model");
    }
    return run_dt_error_sweep(spec, *loaded.marl);
  }
  const RunConfig cfg = seeded(spec.config, spec.seeds.front());
  const MarlModel model = obtain_marl(spec, cfg, spec.seeds.front());
  return run_dt_error_sweep(spec, model);
}

SweepResult run_dt_error_sweep(const ExperimentSpec& spec, const MarlModel& model) {
  validate(spec);
  if (spec.sweep != SweepVariable::dt_error_fixed) {
    throw ConfigError("sweep", "dt-error sweep requires sweep = dt_error_fixed");
  }
  fs::create_directories(spec.out_dir);
  save_config(spec.out_dir / "config.ini", spec.config);

  const Policy policy = marl_policy(model);
  SweepResult result;
  for (double v : spec.values) {
    for (std::uint64_t seed : spec.seeds) {
      ScenarioConfig sc = model.scenario;
      sc.dt_error_mode = DtErrorMode::fixed;
      sc.dt_error_fixed_hz = v;
      validate(sc);
      result.rows.push_back({"marl", v, seed,
                             evaluate(sc, policy, spec.eval_episodes,
                                      model.train.steps_per_episode, eval_seed(seed))});
    }
  }
  result.summary = summarize(result.rows);
  write_sweep_csvs(result, spec, "dt_error_sweep", "dt_error_hz");

  if (spec.plots) {
    result.plot = spec.out_dir / "dt_error_sweep.png";
    write_line_plot(result.plot,
                    summary_series(result.summary, 1e-9,
                                   [](const SweepPoint& p) { return p.mean_total_delay * 1e3; }),
                    {"Task processing delay", "twin error (GHz)", "delay (ms)", true, 800, 500});
  }
  return result;
}

TrendReport resource_trend(const SweepResult& result) {
  TrendReport report;
  std::map<double, double> marl, shared;
  for (const auto& p : result.summary) {
    (p.algorithm == "marl" ? marl : shared)[p.value] = p.resource_usage_ghz;
  }
  // equal up to rounding counts as a tie
  const auto below = [](double a, double b) { return a < b - 1e-9 * std::max(1.0, std::abs(b)); };
  double prev = -std::numeric_limits<double>::infinity();
  double prev_n = 0.0;
  for (const auto& [n, ghz] : marl) {
    if (below(ghz, prev)) {
      report.marl_nondecreasing = false;
      report.notes.push_back(fmt::format("MARL usage drops from {:.3f} GHz (N={}) to {:.3f} GHz (N={})",
                                         prev, prev_n, ghz, n));
    }
    prev = ghz;
    prev_n = n;
    auto it = shared.find(n);
    if (it != shared.end() && below(it->second, ghz)) {
      report.marl_not_above_shared = false;
      report.notes.push_back(fmt::format("N={}: MARL {:.3f} GHz > shared {:.3f} GHz", n, ghz,
                                         it->second));
    }
  }
  return report;
}

TrainOutput run_training(const RunConfig& config, const std::string& algorithm,
                         std::uint64_t seed, const fs::path& out_dir) {
  if (algorithm != "marl" && algorithm != "shared") {
    throw ConfigError("algorithm", "unknown algorithm '" + algorithm + "' (expected marl or shared)");
  }
  const RunConfig cfg = seeded(config, seed);
  validate(cfg.scenario);
  validate(cfg.train);
  fs::create_directories(out_dir);
  save_config(out_dir / "config.ini", cfg);

  TrainOutput output;
  output.csv = out_dir / fmt::format("training_{}_seed{}.csv", algorithm, seed);
  output.checkpoint = out_dir / checkpoint_name(algorithm, cfg.scenario.n_vehicles, seed);
  auto out = open_csv(output.csv, kMetricsHeader);
  write_metadata(output.csv, "train", cfg, {seed});

  VecEnvironment env(cfg.scenario);
  auto log = [&](const EpisodeMetrics& m) { write_metrics_row(out, algorithm, seed, m); };
  if (algorithm == "marl") {
    auto r = train(env, cfg.train, log);
    save_checkpoint(output.checkpoint, r.model, r.rng_state);
    output.history = std::move(r.history);
  } else {
    auto r = shared_baseline_train(env, cfg.train, log);
    save_checkpoint(output.checkpoint, r.model, r.rng_state);
    output.history = std::move(r.history);
  }
  return output;
}

void write_episode_trace(const ScenarioConfig& config, const Policy& policy, int steps,
                         std::uint64_t seed, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream trace(dir / "trace.csv", std::ios::binary | std::ios::trunc);
  std::ofstream channel(dir / "channel.csv", std::ios::binary | std::ios::trunc);
  if (!trace || !channel) throw std::runtime_error("cannot write traces in '" + dir.string() + "'");
  write_trace_header(trace);
  write_channel_header(channel);
  VecEnvironment env(config);
  Rng rng(derive_seed(seed, 1u << 20));
  std::vector<AgentObservation> obs = env.reset(derive_seed(seed, 0));
  for (int t = 0; t < steps; ++t) {
    write_channel_rows(channel, t, env);
    StepResult sr = env.step(policy(obs, t, rng));
    write_trace_rows(trace, t, sr.outcome);
    obs = std::move(sr.observations);
  }
}

EvalResult run_evaluation(const fs::path& checkpoint, int episodes, std::uint64_t seed,
                          const fs::path& out_dir, bool trace) {
  if (episodes < 1) throw ConfigError("episodes", "must be >= 1");
  auto loaded = load_checkpoint(checkpoint);
  RunConfig cfg;
  Policy policy;
  if (loaded.marl) {
    cfg = {loaded.marl->scenario, loaded.marl->train};
    policy = marl_policy(*loaded.marl);
  } else {
    cfg = {loaded.shared->scenario, loaded.shared->train};
    policy = shared_policy(*loaded.shared);
  }
  const EvalResult r =
      evaluate(cfg.scenario, policy, episodes, cfg.train.steps_per_episode, eval_seed(seed));

  fs::create_directories(out_dir);
  const fs::path csv = out_dir / "evaluation.csv";
  {
    auto out = open_csv(csv, "algorithm,seed,episode,mean_reward\n");
    for (std::size_t e = 0; e < r.episode_rewards.size(); ++e) {
      out << fmt::format("{},{},{},{}\n", loaded.algorithm, seed, e,
                         format_double(r.episode_rewards[e]));
    }
  }
  write_metadata(csv, "evaluate", cfg, {seed});
  const fs::path summary = out_dir / "evaluation_summary.csv";
  {
    auto out = open_csv(summary,
                        "algorithm,seed,episodes,mean_reward,mean_total_delay_s,"
                        "resource_usage_ghz,violations_per_slot\n");
    out << fmt::format("{},{},{},{},{},{},{}\n", loaded.algorithm, seed, episodes,
                       format_double(r.mean_reward), format_double(r.mean_total_delay),
                       format_double(r.resource_usage_ghz),
                       format_double(r.violations_per_slot));
  }
  write_metadata(summary, "evaluate", cfg, {seed});
  if (trace) {
    write_episode_trace(cfg.scenario, policy, cfg.train.steps_per_episode, eval_seed(seed),
                        out_dir);
  }
  return r;
}

}  // namespace dtvec
