#pragma once

#include <optional>
#include <vector>

#include "isar/signal.hpp"
#include "isar/vec3.hpp"

namespace isar {

// Virtual monostatic sensor on the circular aperture; transmitter and
// receiver share the origin.
struct RadarPose {
  Point3 origin;
  Point3 boresight;  // unit, toward scene center
  double aperture_angle_deg = 0.0;
};

struct Ray {
  Point3 origin;
  Point3 direction;  // unit
};

struct RayBundle {
  std::vector<Ray> rays;
  double beamwidth_deg = 0.0;
};

// Lattice of ray/sphere intersection points. depth(j, i) is the distance of
// point (ray j, bin i) from the pose origin; for the concentric sampling
// spheres it equals the bin radius exactly.
struct SampleGrid {
  int n_rays = 0;
  int n_bins = 0;
  std::vector<Point3> points;  // ray-major
  std::vector<double> depths;  // ray-major

  const Point3& point(int ray, int bin) const { return points[static_cast<std::size_t>(ray) * n_bins + bin]; }
  double depth(int ray, int bin) const { return depths[static_cast<std::size_t>(ray) * n_bins + bin]; }
};

// Poses at aperture angles {0, skip_deg, 2*skip_deg, ...} < arc_deg, capped
// at n_angles, each at distance standoff_m from the scene center with the
// boresight pointing at the center.
std::vector<RadarPose> virtual_radar_positions(int n_angles, double standoff_m,
                                               double skip_deg, double arc_deg);

// n_rays rays fanned uniformly in the scene plane across
// [-beamwidth_deg/2, +beamwidth_deg/2] around the boresight.
RayBundle generate_ray_bundle(const RadarPose& pose, double beamwidth_deg, int n_rays);

// Smallest positive root of the ray/sphere quadratic, or nullopt when the
// ray misses or the sphere lies behind the origin.
std::optional<double> ray_sphere_intersect(const Ray& ray, const Point3& center,
                                           double radius);

// Intersects every bundle ray with the constant time-of-flight spheres
// centered at the pose origin, one sphere per range bin.
SampleGrid sample_sphere_points(const RadarPose& pose, const RayBundle& bundle,
                                const RangeAxis& axis);

}  // namespace isar
