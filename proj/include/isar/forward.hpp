#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "isar/field.hpp"
#include "isar/geometry.hpp"
#include "isar/signal.hpp"
#include "isar/sim.hpp"

namespace isar::fwd {

struct RenderConfig {
  double beamwidth_deg = 90.0;
  int n_rays = 64;
  double directivity_exponent = 0.0;    // b_T(ray) = cos^e(angle from boresight)
  bool include_two_way_factor = true;   // monostatic factor of 2
  double lambertian_cosine = 1.0;       // degenerate in this geometry; kept as a knob
  bool smooth_with_pulse = true;        // convolve the bin histogram with the pulse
  PulseParams pulse{};
  bool force_unit_transmission = false; // test hook: T == 1 everywhere
};

// T_i = prod_{k<i} exp(-|sigma_k| * |l_{k+1} - l_k|); T_0 = 1.
std::vector<double> transmission(std::span<const double> sigmas,
                                 std::span<const double> depths);

// sigma * ray_cosine * 2T
double lambertian(double sigma, double transmission, double ray_cosine);

// Fixed per-pose sampling lattice shared by the render paths. Lattice points
// outside the field domain square are masked; the field never sees them and
// they scatter nothing.
struct ScanGeometry {
  SampleGrid grid;
  std::vector<double> ray_weights;       // b_T per ray
  std::vector<std::uint8_t> inside;      // per lattice point
  std::vector<std::int32_t> dense_index; // lattice -> dense index, -1 outside
  std::vector<Point3> inside_points;
  int n_rays = 0;
  int n_bins = 0;
};

ScanGeometry make_scan_geometry(const RadarPose& pose, const RenderConfig& cfg,
                                const RangeAxis& axis,
                                double domain_extent = std::numeric_limits<double>::infinity());

// Range profile from per-lattice-point scattering amplitudes (sigma >= 0,
// ray-major). This is the non-differentiable value path.
std::vector<double> render_from_lattice(const ScanGeometry& geom,
                                        std::span<const double> sigmas,
                                        const RenderConfig& cfg, const RangeAxis& axis);

// One differentiable scan against a neural field: values plus everything the
// backward pass needs.
struct FieldScan {
  std::vector<double> row;
  ScanGeometry geom;
  std::vector<double> sigmas;  // full lattice, zero outside the domain
  std::vector<double> trans;   // full lattice transmission
  field::GradientTape tape;
  RenderConfig cfg;
  RangeAxis axis;
};

FieldScan render_scan(const field::FieldParams& params, const RadarPose& pose,
                      const RenderConfig& cfg, const RangeAxis& axis);

// Accumulates d(loss)/d(params) given d(loss)/d(row).
void scan_backward(const FieldScan& scan, std::span<const double> d_row,
                   field::FieldGradient& grad);

sim::Sinogram render_sinogram(const field::FieldParams& params,
                              const std::vector<RadarPose>& poses,
                              const RenderConfig& cfg, const RangeAxis& axis);

}  // namespace isar::fwd
