#include "isar/sim.hpp"

#include <cmath>
#include <stdexcept>

#include "isar/rng.hpp"

namespace isar::sim {

std::vector<double> simulate_scan(const PointTargetScene& scene, const RadarPose& pose,
                                  const PulseParams& p, const RangeAxis& axis) {
  std::vector<double> row(axis.n_bins, 0.0);
  for (const auto& target : scene.targets) {
    const double range = norm(pose.origin - target.position);
    for (int i = 0; i < axis.n_bins; ++i) {
      const double t = 2.0 * (axis.radius(i) - range) / kSpeedOfLight;
      row[i] += target.amplitude * pulse(t, p);
    }
  }
  return row;
}

static Sinogram simulate_impl(const PointTargetScene& scene, const std::vector<RadarPose>& poses,
                              const PulseParams& p, const RangeAxis& axis, bool parallel) {
  if (poses.empty()) throw std::invalid_argument("simulate_sinogram: no poses");
  Sinogram s;
  s.axis = axis;
  s.angles_deg.resize(poses.size());
  s.data.resize(poses.size() * static_cast<std::size_t>(axis.n_bins));
  const int n = static_cast<int>(poses.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (int k = 0; k < n; ++k) {
    s.angles_deg[k] = poses[k].aperture_angle_deg;
    const auto row = simulate_scan(scene, poses[k], p, axis);
    std::copy(row.begin(), row.end(), s.row(k));
  }
  return s;
}

Sinogram simulate_sinogram(const PointTargetScene& scene, const std::vector<RadarPose>& poses,
                           const PulseParams& p, const RangeAxis& axis) {
  return simulate_impl(scene, poses, p, axis, true);
}

Sinogram simulate_sinogram_serial(const PointTargetScene& scene, const std::vector<RadarPose>& poses,
                                  const PulseParams& p, const RangeAxis& axis) {
  return simulate_impl(scene, poses, p, axis, false);
}

Sinogram add_noise(const Sinogram& s, double variance, std::uint64_t seed) {
  if (variance < 0.0) throw std::invalid_argument("add_noise: negative variance");
  Sinogram out = s;
  if (variance == 0.0) return out;
  const double sigma = std::sqrt(variance);
  const std::int64_t n = static_cast<std::int64_t>(out.data.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    SplitMix rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    out.data[i] += sigma * rng.next_gaussian();
  }
  return out;
}

ReconImage ground_truth_image(const PointTargetScene& scene, const GridSpec& grid,
                              double splat_radius_px) {
  validate_grid(grid);
  if (splat_radius_px <= 0.0) throw std::invalid_argument("ground_truth_image: splat radius must be positive");
  ReconImage img(grid);
  const double pitch = grid.pixel_pitch();
  for (const auto& target : scene.targets) {
    // continuous pixel coordinates of the target
    const double col_f = (target.position.x - grid.center.x) / pitch + grid.width / 2.0 - 0.5;
    const double row_f = (target.position.y - grid.center.y) / pitch + grid.height / 2.0 - 0.5;
    if (col_f < -0.5 || col_f > grid.width - 0.5 || row_f < -0.5 || row_f > grid.height - 0.5)
      throw std::invalid_argument("ground_truth_image: target outside grid");
    for (int r = 0; r < grid.height; ++r)
      for (int c = 0; c < grid.width; ++c) {
        const double d2 = (r - row_f) * (r - row_f) + (c - col_f) * (c - col_f);
        img.at(r, c) += std::exp(-d2 / (2.0 * splat_radius_px * splat_radius_px));
      }
  }
  for (auto& v : img.pixels) v = std::min(v, 1.0);
  return img;
}

}  // namespace isar::sim
