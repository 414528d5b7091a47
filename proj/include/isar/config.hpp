#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace isar::cli {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat, typed key-value experiment description. Every key is settable from a
// config file line "key = value" or a command-line override; unknown keys are
// rejected. Defaults run the noise-free single-target demo.
struct ExperimentConfig {
  // scene
  std::string scene_preset = "one";  // one|two|three|four|custom
  std::string scene_targets;         // custom: "x,y,amp; x,y,amp; ..."
  double scene_extent = 0.5;         // m, half-width
  double scene_amplitude = 1.0;      // reflectivity of preset targets
  double noise_variance = 0.0;

  // circular aperture
  double poses_standoff_m = 1.0;
  double poses_skip_deg = 1.0;
  double poses_arc_deg = 360.0;

  // range axis
  double range_r_min_m = 0.3;
  double range_r_max_m = 1.7;
  int range_n_bins = 160;

  // pulse
  double pulse_fc_hz = 4.3e9;
  double pulse_tau0_s = 0.0;  // 0 = derive from the band

  // reconstruction grid
  int grid_width = 128;
  int grid_height = 128;
  double grid_splat_radius_px = 2.0;

  // neural field
  int field_n_levels = 8;
  int field_base_resolution = 16;
  double field_growth_factor = 1.5;
  int field_features_per_level = 2;
  int field_table_size_log2 = 14;
  int field_hidden_width = 64;
  double field_output_bias_init = -6.0;
  double field_domain_pad_m = 0.15;  // field square extends this far beyond the image

  // forward renderer
  double render_beamwidth_deg = 90.0;
  int render_n_rays = 64;
  double render_directivity_exponent = 0.0;
  bool render_two_way_factor = true;
  bool render_pulse_smoothing = true;
  double render_lambertian_cosine = 1.0;

  // training
  int train_n_steps = 2000;
  double train_learning_rate = 1e-2;
  double train_lr_decay = 1.0;
  int train_scans_per_step = 8;
  double train_adam_beta1 = 0.9;
  double train_adam_beta2 = 0.999;
  double train_adam_eps = 1e-8;

  // metrics and display
  int metrics_min_separation_px = 10;
  double metrics_threshold_fraction = 0.3;
  double display_db_floor = 0.0;  // <0 enables the dB clip for PGM output

  std::uint64_t seed = 1;
  int workers = 1;
  std::string output_dir;

  // schema-driven access
  static std::vector<std::string> keys();
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  static ExperimentConfig from_file(const std::string& path);
  void apply_override(const std::string& key_equals_value);  // "key=value"
  std::string to_text() const;                               // round-trippable
};

}  // namespace isar::cli
