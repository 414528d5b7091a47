#pragma once

#include <string>

#include "isar/config.hpp"
#include "isar/field.hpp"
#include "isar/forward.hpp"
#include "isar/geometry.hpp"
#include "isar/image.hpp"
#include "isar/recon.hpp"
#include "isar/sim.hpp"

namespace isar::cli {

// Exit codes shared by every verb.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDiverged = 3;

// Config -> library object builders (also used by the sweeps and tests).
sim::PointTargetScene scene_from_config(const ExperimentConfig& cfg);
std::vector<RadarPose> poses_from_config(const ExperimentConfig& cfg);
RangeAxis axis_from_config(const ExperimentConfig& cfg);
PulseParams pulse_from_config(const ExperimentConfig& cfg);
GridSpec grid_from_config(const ExperimentConfig& cfg);
field::FieldConfig field_config_from(const ExperimentConfig& cfg);
fwd::RenderConfig render_config_from(const ExperimentConfig& cfg);
recon::TrainConfig train_config_from(const ExperimentConfig& cfg);

// simulate: scene -> sinogram file (+ optional PGM preview of the sinogram).
int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_path,
                 const std::string& preview_path = "");

// bp / ats: sinogram file -> image files (+ checkpoint, loss CSV for ats;
// + metrics report against the config scene when requested).
int cmd_bp(const ExperimentConfig& cfg, const std::string& sinogram_path,
           const std::string& out_prefix, bool with_metrics);
int cmd_ats(const ExperimentConfig& cfg, const std::string& sinogram_path,
            const std::string& out_prefix, bool with_metrics);

// metrics: compare two raw float images.
int cmd_metrics(const ExperimentConfig& cfg, const std::string& recon_path,
                const std::string& truth_path, const std::string& out_path);

// sweep: kind in {noise, skip, partial, reflectors}; one CSV row per
// cell x method plus per-cell images under out_dir.
int cmd_sweep(const ExperimentConfig& cfg, const std::string& kind,
              const std::string& out_dir);

// info: describe any artifact file (sinogram, raw image, checkpoint).
int cmd_info(const std::string& path);

}  // namespace isar::cli
