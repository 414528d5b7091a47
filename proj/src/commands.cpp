#include "isar/commands.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "isar/io.hpp"
#include "isar/metrics.hpp"
#include "isar/rng.hpp"

namespace isar::cli {

namespace {

// fixed sub-stream ids off the master seed
constexpr std::uint64_t kNoiseStream = 2;

std::vector<sim::PointTarget> preset_targets(const std::string& preset, double amplitude) {
  // corners of a centered square with 0.3 m sides
  const double d = 0.15;
  const std::vector<Point3> corners = {
      {d, d, 0.0}, {-d, -d, 0.0}, {-d, d, 0.0}, {d, -d, 0.0}};
  int count = 0;
  if (preset == "one") count = 1;
  else if (preset == "two") count = 2;
  else if (preset == "three") count = 3;
  else if (preset == "four") count = 4;
  else throw ConfigError("config: unknown scene.preset '" + preset + "'");
  std::vector<sim::PointTarget> targets;
  for (int i = 0; i < count; ++i) targets.push_back({corners[i], amplitude});
  return targets;
}

std::vector<sim::PointTarget> parse_targets(const std::string& text) {
  std::vector<sim::PointTarget> targets;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    sim::PointTarget t;
    double x = 0.0, y = 0.0, amp = 1.0;
    if (std::sscanf(item.c_str(), " %lf , %lf , %lf", &x, &y, &amp) != 3)
      throw ConfigError("config: scene.targets entry '" + item + "' is not 'x,y,amp'");
    t.position = {x, y, 0.0};
    t.amplitude = amp;
    targets.push_back(t);
  }
  if (targets.empty()) throw ConfigError("config: scene.targets is empty");
  return targets;
}

std::string loss_csv(const std::vector<double>& history) {
  std::ostringstream out;
  out.precision(17);
  out << "step,loss\n";
  for (std::size_t i = 0; i < history.size(); ++i) out << i << ',' << history[i] << '\n';
  return out.str();
}

void write_metrics_report(const metrics::MetricReport& report, const std::string& path) {
  io::write_file_atomic(path, report.to_kv());
  std::fputs(report.to_kv().c_str(), stdout);
}

metrics::MetricReport metrics_against_truth(const ExperimentConfig& cfg,
                                            const ReconImage& image) {
  const auto scene = scene_from_config(cfg);
  const auto truth = sim::ground_truth_image(scene, grid_from_config(cfg),
                                             cfg.grid_splat_radius_px);
  return metrics::evaluate(image, truth, cfg.metrics_min_separation_px,
                           cfg.metrics_threshold_fraction);
}

std::vector<RadarPose> poses_for_sinogram(const ExperimentConfig& cfg,
                                          const sim::Sinogram& s) {
  // rebuild the aperture from the recorded angles; standoff comes from config
  std::vector<RadarPose> poses;
  poses.reserve(s.angles_deg.size());
  for (double ang : s.angles_deg) {
    const double phi = ang * M_PI / 180.0;
    RadarPose pose;
    pose.origin = {cfg.poses_standoff_m * std::cos(phi), cfg.poses_standoff_m * std::sin(phi), 0.0};
    pose.boresight = {-std::cos(phi), -std::sin(phi), 0.0};
    pose.aperture_angle_deg = ang;
    poses.push_back(pose);
  }
  return poses;
}

void write_sinogram_preview(const sim::Sinogram& s, const std::string& path) {
  GridSpec grid;
  grid.width = s.n_bins();
  grid.height = s.n_angles();
  ReconImage img;
  img.grid = grid;
  img.pixels = s.data;
  io::write_image_pgm(img, path);
}

struct SweepRow {
  std::string cell;
  std::string scene;
  std::string method;
  metrics::MetricReport report;
  bool ok = false;
  std::string error;
};

std::string csv_escape(std::string text) {
  for (auto& ch : text)
    if (ch == ',' || ch == '\n') ch = ' ';
  return text;
}

}  // namespace

sim::PointTargetScene scene_from_config(const ExperimentConfig& cfg) {
  sim::PointTargetScene scene;
  scene.extent = cfg.scene_extent;
  scene.targets = cfg.scene_preset == "custom"
                      ? parse_targets(cfg.scene_targets)
                      : preset_targets(cfg.scene_preset, cfg.scene_amplitude);
  for (const auto& t : scene.targets)
    if (std::abs(t.position.x) > scene.extent || std::abs(t.position.y) > scene.extent)
      throw ConfigError("config: target outside the scene extent");
  return scene;
}

std::vector<RadarPose> poses_from_config(const ExperimentConfig& cfg) {
  const int cap = cfg.poses_skip_deg > 0.0
                      ? static_cast<int>(std::ceil(cfg.poses_arc_deg / cfg.poses_skip_deg)) + 1
                      : 1;
  return virtual_radar_positions(cap, cfg.poses_standoff_m, cfg.poses_skip_deg,
                                 cfg.poses_arc_deg);
}

RangeAxis axis_from_config(const ExperimentConfig& cfg) {
  return RangeAxis(cfg.range_r_min_m, cfg.range_r_max_m, cfg.range_n_bins);
}

PulseParams pulse_from_config(const ExperimentConfig& cfg) {
  PulseParams p = default_pulse();
  p.f_c = cfg.pulse_fc_hz;
  if (cfg.pulse_tau0_s > 0.0) p.tau0 = cfg.pulse_tau0_s;
  return p;
}

GridSpec grid_from_config(const ExperimentConfig& cfg) {
  GridSpec grid;
  grid.width = cfg.grid_width;
  grid.height = cfg.grid_height;
  grid.extent = cfg.scene_extent;
  return grid;
}

field::FieldConfig field_config_from(const ExperimentConfig& cfg) {
  field::FieldConfig f;
  f.encoding.n_levels = cfg.field_n_levels;
  f.encoding.base_resolution = cfg.field_base_resolution;
  f.encoding.growth_factor = cfg.field_growth_factor;
  f.encoding.features_per_level = cfg.field_features_per_level;
  f.encoding.table_size_log2 = cfg.field_table_size_log2;
  f.hidden_width = cfg.field_hidden_width;
  f.output_bias_init = cfg.field_output_bias_init;
  f.domain_extent = cfg.scene_extent + cfg.field_domain_pad_m;
  return f;
}

fwd::RenderConfig render_config_from(const ExperimentConfig& cfg) {
  fwd::RenderConfig r;
  r.beamwidth_deg = cfg.render_beamwidth_deg;
  r.n_rays = cfg.render_n_rays;
  r.directivity_exponent = cfg.render_directivity_exponent;
  r.include_two_way_factor = cfg.render_two_way_factor;
  r.smooth_with_pulse = cfg.render_pulse_smoothing;
  r.lambertian_cosine = cfg.render_lambertian_cosine;
  r.pulse = pulse_from_config(cfg);
  return r;
}

recon::TrainConfig train_config_from(const ExperimentConfig& cfg) {
  recon::TrainConfig t;
  t.n_steps = cfg.train_n_steps;
  t.learning_rate = cfg.train_learning_rate;
  t.lr_decay = cfg.train_lr_decay;
  t.scans_per_step = cfg.train_scans_per_step;
  t.adam_beta1 = cfg.train_adam_beta1;
  t.adam_beta2 = cfg.train_adam_beta2;
  t.adam_eps = cfg.train_adam_eps;
  t.seed = cfg.seed;
  return t;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_path,
                 const std::string& preview_path) {
  try {
    const auto scene = scene_from_config(cfg);
    const auto poses = poses_from_config(cfg);
    const auto axis = axis_from_config(cfg);
    auto s = sim::simulate_sinogram(scene, poses, pulse_from_config(cfg), axis);
    if (cfg.noise_variance > 0.0)
      s = sim::add_noise(s, cfg.noise_variance, mix_seed(cfg.seed, kNoiseStream));
    if (out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".csv")
      io::write_sinogram_csv(s, out_path);
    else
      io::write_sinogram(s, out_path);
    if (!preview_path.empty()) write_sinogram_preview(s, preview_path);
    std::printf("wrote %s (%d angles x %d bins)\n", out_path.c_str(), s.n_angles(), s.n_bins());
    return kExitOk;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "simulate failed: %s\n", e.what());
    return kExitConfigError;
  }
}

int cmd_bp(const ExperimentConfig& cfg, const std::string& sinogram_path,
           const std::string& out_prefix, bool with_metrics) {
  try {
    const auto s = sinogram_path.size() > 4 &&
                           sinogram_path.substr(sinogram_path.size() - 4) == ".csv"
                       ? io::read_sinogram_csv(sinogram_path)
                       : io::read_sinogram(sinogram_path);
    const auto poses = poses_for_sinogram(cfg, s);
    const auto image = recon::backproject(s, poses, grid_from_config(cfg));
    io::write_image_raw(image, out_prefix + ".iflt");
    io::write_image_pgm(image, out_prefix + ".pgm", cfg.display_db_floor);
    if (with_metrics)
      write_metrics_report(metrics_against_truth(cfg, image), out_prefix + ".metrics.txt");
    return kExitOk;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bp failed: %s\n", e.what());
    return kExitConfigError;
  }
}

int cmd_ats(const ExperimentConfig& cfg, const std::string& sinogram_path,
            const std::string& out_prefix, bool with_metrics) {
  try {
    const auto s = sinogram_path.size() > 4 &&
                           sinogram_path.substr(sinogram_path.size() - 4) == ".csv"
                       ? io::read_sinogram_csv(sinogram_path)
                       : io::read_sinogram(sinogram_path);
    const auto poses = poses_for_sinogram(cfg, s);
    const auto result = recon::ats_reconstruct(s, poses, grid_from_config(cfg),
                                               field_config_from(cfg), render_config_from(cfg),
                                               train_config_from(cfg));
    io::write_image_raw(result.image, out_prefix + ".iflt");
    io::write_image_pgm(result.image, out_prefix + ".pgm", cfg.display_db_floor);
    field::save_checkpoint(result.params, out_prefix + ".ckpt");
    io::write_file_atomic(out_prefix + "_loss.csv", loss_csv(result.loss_history));
    if (with_metrics)
      write_metrics_report(metrics_against_truth(cfg, result.image), out_prefix + ".metrics.txt");
    return kExitOk;
  } catch (const recon::TrainingDiverged& e) {
    std::fprintf(stderr, "ats diverged at step %d (last finite loss %.6g): %s\n", e.step,
                 e.last_finite_loss, e.what());
    return kExitDiverged;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ats failed: %s\n", e.what());
    return kExitConfigError;
  }
}

int cmd_metrics(const ExperimentConfig& cfg, const std::string& recon_path,
                const std::string& truth_path, const std::string& out_path) {
  try {
    const auto recon_img = io::read_image_raw(recon_path);
    const auto truth_img = io::read_image_raw(truth_path);
    const auto report = metrics::evaluate(recon_img, truth_img, cfg.metrics_min_separation_px,
                                          cfg.metrics_threshold_fraction);
    if (!out_path.empty())
      write_metrics_report(report, out_path);
    else
      std::fputs(report.to_kv().c_str(), stdout);
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "metrics failed: %s\n", e.what());
    return kExitConfigError;
  }
}

int cmd_sweep(const ExperimentConfig& base, const std::string& kind,
              const std::string& out_dir) {
  struct Cell {
    std::string label;
    ExperimentConfig cfg;
  };
  std::vector<Cell> cells;
  try {
    if (kind == "noise") {
      for (double v : {0.0, 0.05, 0.1, 0.2}) {
        ExperimentConfig c = base;
        c.noise_variance = v;
        std::ostringstream label;
        label << "var" << v;
        cells.push_back({label.str(), c});
      }
    } else if (kind == "skip") {
      for (double skip : {1.0, 10.0, 20.0, 30.0}) {
        ExperimentConfig c = base;
        c.poses_skip_deg = skip;
        cells.push_back({"skip" + std::to_string(static_cast<int>(skip)), c});
      }
    } else if (kind == "partial") {
      for (double arc : {90.0, 180.0, 270.0, 360.0}) {
        ExperimentConfig c = base;
        c.poses_arc_deg = arc;
        cells.push_back({"arc" + std::to_string(static_cast<int>(arc)), c});
      }
    } else if (kind == "reflectors") {
      for (const char* preset : {"one", "two", "three", "four"}) {
        ExperimentConfig c = base;
        c.scene_preset = preset;
        cells.push_back({preset, c});
      }
    } else {
      throw ConfigError("sweep: unknown kind '" + kind + "' (noise|skip|partial|reflectors)");
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfigError;
  }

  std::vector<SweepRow> rows(cells.size() * 2);
  const int n_cells = static_cast<int>(cells.size());
  const int workers = std::max(1, base.workers);
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
  for (int ci = 0; ci < n_cells; ++ci) {
    const auto& cell = cells[ci];
    SweepRow& bp_row = rows[2 * ci];
    SweepRow& ats_row = rows[2 * ci + 1];
    bp_row.cell = ats_row.cell = cell.label;
    bp_row.scene = ats_row.scene = cell.cfg.scene_preset;
    bp_row.method = "bp";
    ats_row.method = "ats";
    try {
      const auto scene = scene_from_config(cell.cfg);
      const auto poses = poses_from_config(cell.cfg);
      const auto axis = axis_from_config(cell.cfg);
      auto s = sim::simulate_sinogram(scene, poses, pulse_from_config(cell.cfg), axis);
      if (cell.cfg.noise_variance > 0.0)
        s = sim::add_noise(s, cell.cfg.noise_variance, mix_seed(cell.cfg.seed, kNoiseStream));
      const auto grid = grid_from_config(cell.cfg);
      const auto truth = sim::ground_truth_image(scene, grid, cell.cfg.grid_splat_radius_px);
      const std::string stem = out_dir + "/" + kind + "_" + cell.label;

      const auto bp_img = recon::backproject(s, poses, grid);
      io::write_image_raw(bp_img, stem + "_bp.iflt");
      io::write_image_pgm(bp_img, stem + "_bp.pgm", cell.cfg.display_db_floor);
      bp_row.report = metrics::evaluate(bp_img, truth, cell.cfg.metrics_min_separation_px,
                                        cell.cfg.metrics_threshold_fraction);
      bp_row.ok = true;

      const auto ats = recon::ats_reconstruct(s, poses, grid, field_config_from(cell.cfg),
                                              render_config_from(cell.cfg),
                                              train_config_from(cell.cfg));
      io::write_image_raw(ats.image, stem + "_ats.iflt");
      io::write_image_pgm(ats.image, stem + "_ats.pgm", cell.cfg.display_db_floor);
      io::write_file_atomic(stem + "_ats_loss.csv", loss_csv(ats.loss_history));
      ats_row.report = metrics::evaluate(ats.image, truth, cell.cfg.metrics_min_separation_px,
                                         cell.cfg.metrics_threshold_fraction);
      ats_row.ok = true;
    } catch (const std::exception& e) {
      if (!bp_row.ok) bp_row.error = e.what();
      if (!ats_row.ok) ats_row.error = e.what();
    }
  }

  std::ostringstream csv;
  csv << "kind,cell,scene,method," << metrics::MetricReport::csv_header() << ",status\n";
  csv.precision(10);
  for (const auto& row : rows) {
    csv << kind << ',' << row.cell << ',' << row.scene << ',' << row.method << ',';
    if (row.ok)
      csv << row.report.to_csv_row() << ",ok\n";
    else
      csv << ",,,," << "error: " << csv_escape(row.error) << "\n";
  }
  const std::string csv_path = out_dir + "/sweep_" + kind + ".csv";
  try {
    io::write_file_atomic(csv_path, csv.str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sweep: %s\n", e.what());
    return kExitConfigError;
  }
  std::printf("wrote %s (%zu rows)\n", csv_path.c_str(), rows.size());
  for (const auto& row : rows)
    if (!row.ok) return kExitDiverged;
  return kExitOk;
}

int cmd_info(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "info: cannot open %s\n", path.c_str());
    return kExitConfigError;
  }
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.close();
  try {
    if (std::memcmp(magic, "ISGM", 4) == 0) {
      const auto s = io::read_sinogram(path);
      std::printf("type=sinogram\nn_angles=%d\nn_bins=%d\nr_min_m=%.6g\nr_max_m=%.6g\n",
                  s.n_angles(), s.n_bins(), s.axis.r_min, s.axis.r_max);
    } else if (std::memcmp(magic, "IFLT", 4) == 0) {
      const auto img = io::read_image_raw(path);
      std::printf("type=image\nwidth=%d\nheight=%d\nextent_m=%.6g\n", img.grid.width,
                  img.grid.height, img.grid.extent);
    } else if (std::memcmp(magic, "IFLD", 4) == 0) {
      const auto params = field::load_checkpoint(path);
      const auto& cfg = params.config();
      std::printf("type=checkpoint\nn_levels=%d\nbase_resolution=%d\ngrowth_factor=%.6g\n"
                  "features_per_level=%d\ntable_size_log2=%d\nhidden_width=%d\n"
                  "domain_extent_m=%.6g\nn_params=%zu\n",
                  cfg.encoding.n_levels, cfg.encoding.base_resolution, cfg.encoding.growth_factor,
                  cfg.encoding.features_per_level, cfg.encoding.table_size_log2, cfg.hidden_width,
                  cfg.domain_extent, params.size());
    } else {
      std::fprintf(stderr, "info: unrecognized file %s\n", path.c_str());
      return kExitConfigError;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "info: %s\n", e.what());
    return kExitConfigError;
  }
  return kExitOk;
}

}  // namespace isar::cli
