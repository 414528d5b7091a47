#include "isar/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace isar {

std::vector<RadarPose> virtual_radar_positions(int n_angles, double standoff_m,
                                               double skip_deg, double arc_deg) {
  if (n_angles < 1) throw std::invalid_argument("virtual_radar_positions: n_angles < 1");
  if (standoff_m <= 0.0) throw std::invalid_argument("virtual_radar_positions: standoff must be positive");
  if (arc_deg < 0.0 || arc_deg > 360.0) throw std::invalid_argument("virtual_radar_positions: arc_deg outside [0, 360]");
  if (n_angles > 1 && skip_deg <= 0.0) throw std::invalid_argument("virtual_radar_positions: skip_deg must be positive");

  std::vector<RadarPose> poses;
  for (int k = 0; k < n_angles; ++k) {
    const double ang = k * skip_deg;
    if (ang >= arc_deg) break;
    const double phi = ang * M_PI / 180.0;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    RadarPose pose;
    pose.origin = {standoff_m * c, standoff_m * s, 0.0};
    pose.boresight = {-c, -s, 0.0};
    pose.aperture_angle_deg = ang;
    poses.push_back(pose);
  }
  return poses;
}

RayBundle generate_ray_bundle(const RadarPose& pose, double beamwidth_deg, int n_rays) {
  if (!(beamwidth_deg > 0.0 && beamwidth_deg <= 180.0))
    throw std::invalid_argument("generate_ray_bundle: beamwidth outside (0, 180]");
  if (n_rays < 1) throw std::invalid_argument("generate_ray_bundle: n_rays < 1");

  RayBundle bundle;
  bundle.beamwidth_deg = beamwidth_deg;
  bundle.rays.reserve(n_rays);
  const Point3& b = pose.boresight;
  for (int j = 0; j < n_rays; ++j) {
    double theta_deg = 0.0;
    if (n_rays > 1)
      theta_deg = -beamwidth_deg / 2.0 + j * beamwidth_deg / (n_rays - 1);
    const double t = theta_deg * M_PI / 180.0;
    const double ct = std::cos(t);
    const double st = std::sin(t);
    // in-plane rotation about z
    Point3 dir{b.x * ct - b.y * st, b.x * st + b.y * ct, b.z};
    bundle.rays.push_back(Ray{pose.origin, dir});
  }
  return bundle;
}

std::optional<double> ray_sphere_intersect(const Ray& ray, const Point3& center,
                                           double radius) {
  if (radius <= 0.0) throw std::invalid_argument("ray_sphere_intersect: radius must be positive");
  const Point3 oc = ray.origin - center;
  const double a = dot(ray.direction, ray.direction);
  const double b = 2.0 * dot(oc, ray.direction);
  const double c = dot(oc, oc) - radius * radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  // Near intersection first: occlusion accumulates front to back.
  const double l_near = (-b - sq) / (2.0 * a);
  if (l_near > 0.0) return l_near;
  const double l_far = (-b + sq) / (2.0 * a);
  if (l_far > 0.0) return l_far;
  return std::nullopt;
}

SampleGrid sample_sphere_points(const RadarPose& pose, const RayBundle& bundle,
                                const RangeAxis& axis) {
  SampleGrid grid;
  grid.n_rays = static_cast<int>(bundle.rays.size());
  grid.n_bins = axis.n_bins;
  grid.points.resize(static_cast<std::size_t>(grid.n_rays) * grid.n_bins);
  grid.depths.resize(grid.points.size());
  for (int j = 0; j < grid.n_rays; ++j) {
    const Ray& ray = bundle.rays[j];
    for (int i = 0; i < grid.n_bins; ++i) {
      // Spheres are concentric with the pose origin, so the positive root of
      // the intersection quadratic is the bin radius itself.
      const double r = axis.radius(i);
      const std::size_t idx = static_cast<std::size_t>(j) * grid.n_bins + i;
      grid.depths[idx] = r;
      grid.points[idx] = pose.origin + r * ray.direction;
    }
  }
  return grid;
}

}  // namespace isar
