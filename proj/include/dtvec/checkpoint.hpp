#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "dtvec/marl.hpp"
#include "dtvec/shared_baseline.hpp"

namespace dtvec {

inline constexpr int kCheckpointVersion = 1;

// JSON document: format tag, version, algorithm ("marl" | "shared"), the run
// configuration as INI text, every network's shape and parameters, and the
// trainer's RNG state. Optimizer moments are not stored; a loaded model is
// meant for evaluation.
void save_checkpoint(const std::filesystem::path& path, const MarlModel& model,
                     const std::string& rng_state);
void save_checkpoint(const std::filesystem::path& path, const SharedModel& model,
                     const std::string& rng_state);

struct LoadedCheckpoint {
  std::string algorithm;
  std::optional<MarlModel> marl;
  std::optional<SharedModel> shared;
  std::string rng_state;
};

// Throws std::runtime_error on a malformed file or unsupported version.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace dtvec
