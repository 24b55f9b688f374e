#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dtvec/scenario.hpp"
#include "dtvec/train_config.hpp"

namespace dtvec {

// Everything a run needs besides the seed list.
struct RunConfig {
  ScenarioConfig scenario;
  TrainConfig train;

  bool operator==(const RunConfig&) const = default;
};

// INI-style text: sections group related fields, every key is unique across
// sections so a bare field name addresses it. Doubles are written in their
// shortest round-trip form.
std::string to_ini(const RunConfig& config);

// Keys missing from the text keep their value from `base`. Unknown sections
// or keys and malformed values throw ConfigError. The result is validated.
RunConfig parse_ini(const std::string& text, const RunConfig& base = {});

RunConfig load_config(const std::filesystem::path& path, const RunConfig& base = {});
void save_config(const std::filesystem::path& path, const RunConfig& config);

// `key` is a bare field name such as "n_vehicles" or "critic_lr".
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

// Parses "key=value".
void apply_override(RunConfig& config, const std::string& assignment);

std::string get_field(const RunConfig& config, const std::string& key);
std::vector<std::string> field_names();

// FNV-1a over the canonical INI text.
std::uint64_t config_hash(const RunConfig& config);

// Strict numeric parsing shared with other file readers.
double parse_double(const std::string& field, const std::string& text);
std::vector<double> parse_double_list(const std::string& field, const std::string& text);
std::string format_double(double value);

}  // namespace dtvec
