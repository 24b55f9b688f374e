#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dtvec/baselines.hpp"
#include "dtvec/config_io.hpp"
#include "dtvec/marl.hpp"
#include "dtvec/shared_baseline.hpp"

namespace dtvec {

enum class SweepVariable { none, n_vehicles, dt_error_fixed };

std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& text);

// Default configuration of the experiment runners: the library defaults with
// the twin error fixed at +0.2 GHz.
RunConfig experiment_defaults();

// Copy of `config` with both the scenario and the trainer seeded by `seed`.
RunConfig seeded(const RunConfig& config, std::uint64_t seed);

struct ExperimentSpec {
  std::string name = "experiment";
  RunConfig config = experiment_defaults();
  std::vector<std::uint64_t> seeds{0, 1, 2};
  SweepVariable sweep = SweepVariable::none;
  std::vector<double> values;
  std::filesystem::path out_dir = "runs";
  int eval_episodes = 10;
  bool plots = true;
  // Sweeps load a matching checkpoint from checkpoint_dir instead of training.
  bool reuse_checkpoints = false;
  std::filesystem::path checkpoint_dir;    // empty: out_dir / "checkpoints"
  std::filesystem::path policy_checkpoint; // dt-error sweep: policy to evaluate
};

// Throws ConfigError naming the offending field.
void validate(const ExperimentSpec& spec);

// "<algorithm>_n<N>_seed<seed>.json"
std::string checkpoint_name(const std::string& algorithm, int n_vehicles, std::uint64_t seed);

// Seed passed to evaluate() for a given experiment seed.
std::uint64_t eval_seed(std::uint64_t seed);

std::vector<double> trailing_mean(const std::vector<double>& values, int window);
inline constexpr int kSmoothingWindow = 20;

struct SeedCurves {
  std::uint64_t seed = 0;
  std::vector<EpisodeMetrics> marl;
  std::vector<EpisodeMetrics> shared;
  EvalResult random;
};

struct ConvergenceResult {
  std::vector<SeedCurves> runs;
  std::vector<MarlModel> marl_models;  // one per seed
  std::vector<SharedModel> shared_models;
  std::filesystem::path csv;
  std::filesystem::path smoothed_csv;
  std::filesystem::path plot;
};

// Trains MARL and the shared baseline for every seed and evaluates the random
// policy. Writes convergence.csv (one row per algorithm, seed and episode,
// appended as training progresses), convergence_smoothed.csv (seed mean and
// trailing mean), convergence.png and one checkpoint per model.
ConvergenceResult run_convergence(const ExperimentSpec& spec);

struct SweepRow {
  std::string algorithm;
  double value = 0.0;
  std::uint64_t seed = 0;
  EvalResult eval;
};

struct SweepPoint {
  std::string algorithm;
  double value = 0.0;
  double resource_usage_ghz = 0.0;  // seed mean
  double mean_total_delay = 0.0;
  double mean_reward = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepPoint> summary;  // grouped by algorithm, in sweep order
  std::filesystem::path csv;
  std::filesystem::path summary_csv;
  std::filesystem::path plot;
};

// For each N in spec.values and each seed, trains (or loads) MARL and the
// shared baseline and evaluates their aggregate allocation per slot.
SweepResult run_resource_sweep(const ExperimentSpec& spec);

// Evaluates one MARL policy (spec.policy_checkpoint, or trained on the first
// seed) with the twin error fixed at each value of spec.values, using the
// same evaluation seeds at every point.
SweepResult run_dt_error_sweep(const ExperimentSpec& spec);
SweepResult run_dt_error_sweep(const ExperimentSpec& spec, const MarlModel& model);

struct TrendReport {
  bool marl_nondecreasing = true;
  bool marl_not_above_shared = true;
  std::vector<std::string> notes;
  bool ok() const { return marl_nondecreasing && marl_not_above_shared; }
};

TrendReport resource_trend(const SweepResult& result);

struct TrainOutput {
  std::vector<EpisodeMetrics> history;
  std::filesystem::path checkpoint;
  std::filesystem::path csv;
};

// Single training run ("marl" or "shared"): per-episode CSV and checkpoint.
TrainOutput run_training(const RunConfig& config, const std::string& algorithm,
                         std::uint64_t seed, const std::filesystem::path& out_dir);

// Evaluates a checkpoint; writes evaluation.csv with one row per episode.
// With `trace`, also writes trace.csv and channel.csv for the first episode.
EvalResult run_evaluation(const std::filesystem::path& checkpoint, int episodes,
                          std::uint64_t seed, const std::filesystem::path& out_dir,
                          bool trace = false);

// Replays the first episode evaluate(config, policy, ., steps, seed) would run
// and writes its per-slot trace and channel trace into `dir`.
void write_episode_trace(const ScenarioConfig& config, const Policy& policy, int steps,
                         std::uint64_t seed, const std::filesystem::path& dir);

// Writes "<csv>.meta.json": experiment name, config hash, seeds, version.
void write_metadata(const std::filesystem::path& csv, const std::string& experiment,
                    const RunConfig& config, const std::vector<std::uint64_t>& seeds);

}  // namespace dtvec
