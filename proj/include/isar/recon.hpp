#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "isar/field.hpp"
#include "isar/forward.hpp"
#include "isar/image.hpp"
#include "isar/sim.hpp"

namespace isar::recon {

struct TrainConfig {
  int n_steps = 2000;
  double learning_rate = 1e-2;
  double lr_decay = 1.0;  // per-step multiplicative factor; 1 = constant rate
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int scans_per_step = 8;
  std::uint64_t seed = 1;
};

struct AdamState {
  std::vector<double> m, v;
  std::int64_t step = 0;
};

// Delay-and-sum: per pixel, linear interpolation of each pose's range
// profile at the pixel's round-trip range, magnitude at the end. Ranges
// outside the axis contribute nothing.
ReconImage backproject(const sim::Sinogram& s, const std::vector<RadarPose>& poses,
                       const GridSpec& grid);
ReconImage backproject_serial(const sim::Sinogram& s, const std::vector<RadarPose>& poses,
                              const GridSpec& grid);
// Signed accumulation before the magnitude; used by the equivariance and
// linearity checks.
std::vector<double> backproject_raw(const sim::Sinogram& s,
                                    const std::vector<RadarPose>& poses,
                                    const GridSpec& grid);

// Mean squared error over bins.
double scan_loss(std::span<const double> estimated, std::span<const double> measured);

// Bias-corrected Adam. Returns false (no update, counter unchanged) when the
// gradient contains a non-finite entry.
bool adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, const TrainConfig& cfg);

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int at_step, double last_finite, const std::string& what)
      : std::runtime_error(what), step(at_step), last_finite_loss(last_finite) {}
  int step;
  double last_finite_loss;
};

struct AtsResult {
  ReconImage image;
  field::FieldParams params;
  std::vector<double> loss_history;
};

// Analysis-through-synthesis: per step, render a random subset of scans,
// average the per-scan MSE, backpropagate, Adam-update; finally sample the
// field over the grid.
AtsResult ats_reconstruct(const sim::Sinogram& s, const std::vector<RadarPose>& poses,
                          const GridSpec& grid, const field::FieldConfig& field_cfg,
                          const fwd::RenderConfig& render_cfg, const TrainConfig& train_cfg);

// Field sampled at the pixel centers; no normalization.
ReconImage extract_image(const field::FieldParams& params, const GridSpec& grid);
ReconImage extract_image_serial(const field::FieldParams& params, const GridSpec& grid);

}  // namespace isar::recon
