#pragma once

#include <cstdint>
#include <vector>

#include "isar/geometry.hpp"
#include "isar/image.hpp"
#include "isar/signal.hpp"
#include "isar/vec3.hpp"

namespace isar::sim {

// Ideal point scatterer.
struct PointTarget {
  Point3 position;         // z = 0 in the plane experiments
  double amplitude = 1.0;  // reflectivity, >= 0
};

struct PointTargetScene {
  std::vector<PointTarget> targets;
  double extent = 0.5;  // half-width of the square scene, m
};

// Stack of received range profiles over aspect angle; the measurement y.
struct Sinogram {
  std::vector<double> data;  // n_angles * n_bins, row-major
  std::vector<double> angles_deg;
  RangeAxis axis;

  int n_angles() const { return static_cast<int>(angles_deg.size()); }
  int n_bins() const { return axis.n_bins; }
  double* row(int i) { return data.data() + static_cast<std::size_t>(i) * n_bins(); }
  const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * n_bins(); }
};

// One range profile: each target contributes a range-shifted pulse centered
// at its two-way range from the pose origin.
std::vector<double> simulate_scan(const PointTargetScene& scene, const RadarPose& pose,
                                  const PulseParams& p, const RangeAxis& axis);

Sinogram simulate_sinogram(const PointTargetScene& scene, const std::vector<RadarPose>& poses,
                           const PulseParams& p, const RangeAxis& axis);
// Reference implementation without the parallel row loop.
Sinogram simulate_sinogram_serial(const PointTargetScene& scene, const std::vector<RadarPose>& poses,
                                  const PulseParams& p, const RangeAxis& axis);

// Adds i.i.d. zero-mean Gaussian noise of the given variance to every entry.
// Per-entry streams are derived from (seed, entry index), so the output does
// not depend on the worker count.
Sinogram add_noise(const Sinogram& s, double variance, std::uint64_t seed);

// Metric reference: each target splatted as a unit-height Gaussian of the
// given pixel radius, clipped to [0, 1].
ReconImage ground_truth_image(const PointTargetScene& scene, const GridSpec& grid,
                              double splat_radius_px = 2.0);

}  // namespace isar::sim
