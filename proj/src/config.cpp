#include "isar/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace isar::cli {

namespace {

struct KeySpec {
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an unsigned integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + value + "'");
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

#define KEY_DOUBLE(keyname, member)                                                   \
  KeySpec {                                                                           \
    keyname, [](ExperimentConfig& c, const std::string& v) { c.member = parse_double(keyname, v); }, \
        [](const ExperimentConfig& c) { return fmt(c.member); }                       \
  }
#define KEY_INT(keyname, member)                                                      \
  KeySpec {                                                                           \
    keyname, [](ExperimentConfig& c, const std::string& v) { c.member = parse_int(keyname, v); },    \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }            \
  }
#define KEY_BOOL(keyname, member)                                                     \
  KeySpec {                                                                           \
    keyname, [](ExperimentConfig& c, const std::string& v) { c.member = parse_bool(keyname, v); },   \
        [](const ExperimentConfig& c) { return c.member ? "true" : "false"; }         \
  }
#define KEY_STRING(keyname, member)                                                  \
  KeySpec {                                                                           \
    keyname, [](ExperimentConfig& c, const std::string& v) { c.member = v; },         \
        [](const ExperimentConfig& c) { return c.member; }                            \
  }

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> table = {
      KEY_STRING("scene.preset", scene_preset),
      KEY_STRING("scene.targets", scene_targets),
      KEY_DOUBLE("scene.extent", scene_extent),
      KEY_DOUBLE("scene.amplitude", scene_amplitude),
      KEY_DOUBLE("noise.variance", noise_variance),
      KEY_DOUBLE("poses.standoff_m", poses_standoff_m),
      KEY_DOUBLE("poses.skip_deg", poses_skip_deg),
      KEY_DOUBLE("poses.arc_deg", poses_arc_deg),
      KEY_DOUBLE("range.r_min_m", range_r_min_m),
      KEY_DOUBLE("range.r_max_m", range_r_max_m),
      KEY_INT("range.n_bins", range_n_bins),
      KEY_DOUBLE("pulse.fc_hz", pulse_fc_hz),
      KEY_DOUBLE("pulse.tau0_s", pulse_tau0_s),
      KEY_INT("grid.width", grid_width),
      KEY_INT("grid.height", grid_height),
      KEY_DOUBLE("grid.splat_radius_px", grid_splat_radius_px),
      KEY_INT("field.n_levels", field_n_levels),
      KEY_INT("field.base_resolution", field_base_resolution),
      KEY_DOUBLE("field.growth_factor", field_growth_factor),
      KEY_INT("field.features_per_level", field_features_per_level),
      KEY_INT("field.table_size_log2", field_table_size_log2),
      KEY_INT("field.hidden_width", field_hidden_width),
      KEY_DOUBLE("field.output_bias_init", field_output_bias_init),
      KEY_DOUBLE("field.domain_pad_m", field_domain_pad_m),
      KEY_DOUBLE("render.beamwidth_deg", render_beamwidth_deg),
      KEY_INT("render.n_rays", render_n_rays),
      KEY_DOUBLE("render.directivity_exponent", render_directivity_exponent),
      KEY_BOOL("render.two_way_factor", render_two_way_factor),
      KEY_BOOL("render.pulse_smoothing", render_pulse_smoothing),
      KEY_DOUBLE("render.lambertian_cosine", render_lambertian_cosine),
      KEY_INT("train.n_steps", train_n_steps),
      KEY_DOUBLE("train.learning_rate", train_learning_rate),
      KEY_DOUBLE("train.lr_decay", train_lr_decay),
      KEY_INT("train.scans_per_step", train_scans_per_step),
      KEY_DOUBLE("train.adam_beta1", train_adam_beta1),
      KEY_DOUBLE("train.adam_beta2", train_adam_beta2),
      KEY_DOUBLE("train.adam_eps", train_adam_eps),
      KEY_INT("metrics.min_separation_px", metrics_min_separation_px),
      KEY_DOUBLE("metrics.threshold_fraction", metrics_threshold_fraction),
      KEY_DOUBLE("display.db_floor", display_db_floor),
      KeySpec{"seed",
              [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64("seed", v); },
              [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      KEY_INT("workers", workers),
      KEY_STRING("output.dir", output_dir),
  };
  return table;
}

#undef KEY_DOUBLE
#undef KEY_INT
#undef KEY_BOOL
#undef KEY_STRING

const KeySpec* find_key(const std::string& key) {
  for (const auto& spec : schema())
    if (spec.name == key) return &spec;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::vector<std::string> ExperimentConfig::keys() {
  std::vector<std::string> names;
  for (const auto& spec : schema()) names.push_back(spec.name);
  return names;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError("config: unknown key '" + key + "'");
  spec->set(*this, value);
}

std::string ExperimentConfig::get(const std::string& key) const {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError("config: unknown key '" + key + "'");
  return spec->get(*this);
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: " + path + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void ExperimentConfig::apply_override(const std::string& key_equals_value) {
  const auto eq = key_equals_value.find('=');
  if (eq == std::string::npos)
    throw ConfigError("config: override '" + key_equals_value + "' is not key=value");
  set(trim(key_equals_value.substr(0, eq)), trim(key_equals_value.substr(eq + 1)));
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  for (const auto& spec : schema()) out << spec.name << " = " << spec.get(*this) << "\n";
  return out.str();
}

}  // namespace isar::cli
