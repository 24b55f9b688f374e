#include "dtvec/config_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace dtvec {

namespace pt = boost::property_tree;

std::string format_double(double value) { return fmt::format("{}", value); }

double parse_double(const std::string& field, const std::string& text) {
  auto first = text.find_first_not_of(" \t");
  auto last = text.find_last_not_of(" \t");
  if (first == std::string::npos) throw ConfigError(field, "empty value");
  const char* begin = text.data() + first;
  const char* end = text.data() + last + 1;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(field, item));
  if (out.empty()) throw ConfigError(field, "expected a comma-separated list");
  return out;
}

namespace {

long long parse_integer(const std::string& field, const std::string& text) {
  double v = parse_double(field, text);
  if (v != static_cast<double>(static_cast<long long>(v))) {
    throw ConfigError(field, "expected an integer, got '" + text + "'");
  }
  return static_cast<long long>(v);
}

std::uint64_t parse_unsigned(const std::string& field, const std::string& text) {
  auto first = text.find_first_not_of(" \t");
  auto last = text.find_last_not_of(" \t");
  if (first == std::string::npos) throw ConfigError(field, "empty value");
  std::uint64_t out = 0;
  const char* end = text.data() + last + 1;
  auto [ptr, ec] = std::from_chars(text.data() + first, end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(field, "expected a non-negative integer, got '" + text + "'");
  }
  return out;
}

bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(field, "expected true or false, got '" + text + "'");
}

Range parse_range(const std::string& field, const std::string& text) {
  auto v = parse_double_list(field, text);
  if (v.size() != 2) throw ConfigError(field, "expected 'min,max'");
  return {v[0], v[1]};
}

std::string format_range(const Range& r) {
  return format_double(r.min) + "," + format_double(r.max);
}

std::vector<int> parse_int_list(const std::string& field, const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(field, text)) {
    if (v != static_cast<double>(static_cast<int>(v))) {
      throw ConfigError(field, "expected integers");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string format_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define DTVEC_DOUBLE(sec, obj, name)                                       \
  Field {                                                                  \
    sec, #name, [](const RunConfig& c) { return format_double(c.obj.name); }, \
        [](RunConfig& c, const std::string& v) { c.obj.name = parse_double(#name, v); } \
  }
#define DTVEC_INT(sec, obj, name)                                               \
  Field {                                                                       \
    sec, #name, [](const RunConfig& c) { return std::to_string(c.obj.name); },  \
        [](RunConfig& c, const std::string& v) {                                \
          c.obj.name = static_cast<decltype(c.obj.name)>(parse_integer(#name, v)); \
        }                                                                       \
  }
#define DTVEC_RANGE(sec, obj, name)                                        \
  Field {                                                                  \
    sec, #name, [](const RunConfig& c) { return format_range(c.obj.name); }, \
        [](RunConfig& c, const std::string& v) { c.obj.name = parse_range(#name, v); } \
  }
#define DTVEC_BOOL(sec, obj, name)                                                \
  Field {                                                                         \
    sec, #name, [](const RunConfig& c) { return std::string(c.obj.name ? "true" : "false"); }, \
        [](RunConfig& c, const std::string& v) { c.obj.name = parse_bool(#name, v); } \
  }

const std::vector<Field>& registry() {
  static const std::vector<Field> fields = {
      DTVEC_INT("fleet", scenario, n_vehicles),
      DTVEC_DOUBLE("fleet", scenario, road_length_m),
      Field{"fleet", "bs_position_m",
            [](const RunConfig& c) {
              return format_double(c.scenario.bs_position_m.x()) + "," +
                     format_double(c.scenario.bs_position_m.y());
            },
            [](RunConfig& c, const std::string& v) {
              auto xy = parse_double_list("bs_position_m", v);
              if (xy.size() != 2) throw ConfigError("bs_position_m", "expected 'x,y'");
              c.scenario.bs_position_m = Vec2(xy[0], xy[1]);
            }},
      DTVEC_RANGE("fleet", scenario, vehicle_speed_range_mps),
      DTVEC_DOUBLE("fleet", scenario, slot_duration_s),

      DTVEC_INT("tasks", scenario, k_tasks),
      DTVEC_RANGE("tasks", scenario, task_size_range_bytes),
      DTVEC_DOUBLE("tasks", scenario, cycles_per_byte),
      DTVEC_DOUBLE("tasks", scenario, deadline_s),

      DTVEC_DOUBLE("channel", scenario, bandwidth_hz),
      DTVEC_DOUBLE("channel", scenario, tx_power_w),
      DTVEC_DOUBLE("channel", scenario, tx_power_max_w),
      DTVEC_DOUBLE("channel", scenario, noise_power_w),
      DTVEC_DOUBLE("channel", scenario, fading_corr),
      DTVEC_DOUBLE("channel", scenario, path_loss_exp),
      Field{"channel", "fading_mode",
            [](const RunConfig& c) { return to_string(c.scenario.fading_mode); },
            [](RunConfig& c, const std::string& v) { c.scenario.fading_mode = parse_fading_mode(v); }},

      DTVEC_DOUBLE("compute", scenario, f_server_hz),
      DTVEC_DOUBLE("compute", scenario, f_local_hz),
      DTVEC_DOUBLE("compute", scenario, f_alloc_min_hz),
      DTVEC_DOUBLE("compute", scenario, f_alloc_max_hz),
      DTVEC_DOUBLE("compute", scenario, epsilon_hz),
      DTVEC_BOOL("compute", scenario, hard_cap),

      DTVEC_RANGE("digital_twin", scenario, dt_error_range_hz),
      Field{"digital_twin", "dt_error_mode",
            [](const RunConfig& c) { return to_string(c.scenario.dt_error_mode); },
            [](RunConfig& c, const std::string& v) { c.scenario.dt_error_mode = parse_dt_error_mode(v); }},
      DTVEC_DOUBLE("digital_twin", scenario, dt_error_fixed_hz),

      DTVEC_DOUBLE("reward", scenario, reward_beta),
      DTVEC_DOUBLE("reward", scenario, reward_eta),
      DTVEC_DOUBLE("reward", scenario, discount),

      Field{"scenario", "seed", [](const RunConfig& c) { return std::to_string(c.scenario.seed); },
            [](RunConfig& c, const std::string& v) { c.scenario.seed = parse_unsigned("seed", v); }},

      DTVEC_INT("train", train, episodes),
      DTVEC_INT("train", train, steps_per_episode),
      DTVEC_INT("train", train, batch_size),
      DTVEC_INT("train", train, buffer_capacity),
      DTVEC_DOUBLE("train", train, actor_lr),
      DTVEC_DOUBLE("train", train, critic_lr),
      DTVEC_DOUBLE("train", train, soft_update_rate),
      DTVEC_DOUBLE("train", train, noise_std_initial),
      DTVEC_DOUBLE("train", train, noise_std_final),
      DTVEC_DOUBLE("train", train, noise_decay_fraction),
      DTVEC_INT("train", train, warmup_steps),
      Field{"train", "actor_hidden",
            [](const RunConfig& c) { return format_int_list(c.train.actor_hidden); },
            [](RunConfig& c, const std::string& v) { c.train.actor_hidden = parse_int_list("actor_hidden", v); }},
      Field{"train", "critic_hidden",
            [](const RunConfig& c) { return format_int_list(c.train.critic_hidden); },
            [](RunConfig& c, const std::string& v) { c.train.critic_hidden = parse_int_list("critic_hidden", v); }},
      DTVEC_DOUBLE("train", train, policy_std),
      Field{"train", "policy_variant",
            [](const RunConfig& c) { return to_string(c.train.policy_variant); },
            [](RunConfig& c, const std::string& v) { c.train.policy_variant = parse_policy_variant(v); }},
      DTVEC_BOOL("train", train, advantage_baseline),
      Field{"train", "optimizer",
            [](const RunConfig& c) { return to_string(c.train.optimizer); },
            [](RunConfig& c, const std::string& v) { c.train.optimizer = parse_optimizer_kind(v); }},
      DTVEC_DOUBLE("train", train, reward_scale),
      Field{"train", "train_seed", [](const RunConfig& c) { return std::to_string(c.train.seed); },
            [](RunConfig& c, const std::string& v) { c.train.seed = parse_unsigned("train_seed", v); }},
  };
  return fields;
}

#undef DTVEC_DOUBLE
#undef DTVEC_INT
#undef DTVEC_RANGE
#undef DTVEC_BOOL

const Field& find_field(const std::string& key) {
  for (const auto& f : registry()) {
    if (key == f.key) return f;
  }
  throw ConfigError(key, "unknown configuration field");
}

}  // namespace

std::vector<std::string> field_names() {
  std::vector<std::string> out;
  for (const auto& f : registry()) out.emplace_back(f.key);
  return out;
}

std::string get_field(const RunConfig& config, const std::string& key) {
  return find_field(key).get(config);
}

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
  find_field(key).set(config, value);
}

void apply_override(RunConfig& config, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(assignment, "override must look like key=value");
  }
  apply_override(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::string to_ini(const RunConfig& config) {
  pt::ptree tree;
  for (const auto& f : registry()) {
    tree.put(pt::ptree::path_type(std::string(f.section) + "/" + f.key, '/'), f.get(config));
  }
  std::ostringstream os;
  pt::write_ini(os, tree);
  return os.str();
}

RunConfig parse_ini(const std::string& text, const RunConfig& base) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig out = base;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError(section, "top-level keys are not allowed; put fields inside a [section]");
    }
    for (const auto& [key, value] : body) {
      const Field& f = find_field(key);
      if (section != f.section) {
        throw ConfigError(key, "belongs in section [" + std::string(f.section) + "], found in [" +
                                   section + "]");
      }
      f.set(out, value.get_value<std::string>());
    }
  }
  validate(out.scenario);
  validate(out.train);
  return out;
}

RunConfig load_config(const std::filesystem::path& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ini(ss.str(), base);
}

void save_config(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream out(path);
  if (!out) throw ConfigError("config", "cannot write '" + path.string() + "'");
  out << to_ini(config);
}

std::uint64_t config_hash(const RunConfig& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_ini(config)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace dtvec
