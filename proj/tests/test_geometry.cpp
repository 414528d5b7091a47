#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "isar/geometry.hpp"
#include "isar/rng.hpp"

using namespace isar;

TEST_CASE("full circle at 1 degree skip gives 360 poses") {
  const auto poses = virtual_radar_positions(360, 1.0, 1.0, 360.0);
  REQUIRE(poses.size() == 360);
  for (int k = 0; k < 360; ++k) {
    CHECK(poses[k].aperture_angle_deg == doctest::Approx(k));
    CHECK(norm(poses[k].origin) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(poses[k].boresight) == doctest::Approx(1.0).epsilon(1e-12));
    // boresight points at the scene center
    const Point3 to_center = -1.0 * poses[k].origin;
    CHECK(dot(poses[k].boresight, to_center) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("10 degree skip over a full circle gives 36 poses") {
  const auto poses = virtual_radar_positions(1000, 1.0, 10.0, 360.0);
  CHECK(poses.size() == 36);
}

TEST_CASE("90 degree arc at 1 degree skip covers 0..89") {
  const auto poses = virtual_radar_positions(1000, 1.0, 1.0, 90.0);
  REQUIRE(poses.size() == 90);
  CHECK(poses.front().aperture_angle_deg == 0.0);
  CHECK(poses.back().aperture_angle_deg == doctest::Approx(89.0));
}

TEST_CASE("skip-k pose angles are a subset of skip-1 angles") {
  const auto fine = virtual_radar_positions(1000, 1.0, 1.0, 360.0);
  for (double k : {2.0, 5.0, 30.0}) {
    const auto coarse = virtual_radar_positions(1000, 1.0, k, 360.0);
    for (const auto& pose : coarse) {
      const int idx = static_cast<int>(std::lround(pose.aperture_angle_deg));
      REQUIRE(idx < static_cast<int>(fine.size()));
      CHECK(fine[idx].aperture_angle_deg == doctest::Approx(pose.aperture_angle_deg));
    }
  }
}

TEST_CASE("pose generation errors") {
  CHECK_THROWS_AS(virtual_radar_positions(10, -1.0, 1.0, 360.0), std::invalid_argument);
  CHECK_THROWS_AS(virtual_radar_positions(10, 0.0, 1.0, 360.0), std::invalid_argument);
  CHECK_THROWS_AS(virtual_radar_positions(10, 1.0, 0.0, 360.0), std::invalid_argument);
  CHECK_THROWS_AS(virtual_radar_positions(10, 1.0, 1.0, 400.0), std::invalid_argument);
}

static RadarPose pose_at(double angle_deg, double standoff = 1.0) {
  const double phi = angle_deg * M_PI / 180.0;
  RadarPose p;
  p.origin = {standoff * std::cos(phi), standoff * std::sin(phi), 0.0};
  p.boresight = {-std::cos(phi), -std::sin(phi), 0.0};
  p.aperture_angle_deg = angle_deg;
  return p;
}

TEST_CASE("single-ray bundle equals the boresight") {
  const auto pose = pose_at(33.0);
  const auto bundle = generate_ray_bundle(pose, 90.0, 1);
  REQUIRE(bundle.rays.size() == 1);
  CHECK(bundle.rays[0].direction.x == pose.boresight.x);
  CHECK(bundle.rays[0].direction.y == pose.boresight.y);
}

TEST_CASE("three rays over 90 degrees sit at -45, 0, +45") {
  const auto pose = pose_at(0.0);
  const auto bundle = generate_ray_bundle(pose, 90.0, 3);
  REQUIRE(bundle.rays.size() == 3);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(dot(bundle.rays[0].direction, pose.boresight) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  CHECK(dot(bundle.rays[1].direction, pose.boresight) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dot(bundle.rays[2].direction, pose.boresight) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
}

TEST_CASE("61 rays over 60 degrees are 1 degree apart") {
  const auto pose = pose_at(120.0);
  const auto bundle = generate_ray_bundle(pose, 60.0, 61);
  REQUIRE(bundle.rays.size() == 61);
  const double cos1deg = std::cos(M_PI / 180.0);
  for (int j = 1; j < 61; ++j) {
    const double d = dot(bundle.rays[j - 1].direction, bundle.rays[j].direction);
    CHECK(d == doctest::Approx(cos1deg).epsilon(1e-12));
  }
}

TEST_CASE("odd ray fan is symmetric about the boresight") {
  const auto pose = pose_at(75.0);
  const auto bundle = generate_ray_bundle(pose, 80.0, 9);
  for (int j = 0; j < 9; ++j) {
    const auto& a = bundle.rays[j].direction;
    const auto& b = bundle.rays[8 - j].direction;
    // mirrored rays make equal angles with the boresight
    CHECK(dot(a, pose.boresight) == doctest::Approx(dot(b, pose.boresight)).epsilon(1e-12));
  }
}

TEST_CASE("ray bundle errors") {
  const auto pose = pose_at(0.0);
  CHECK_THROWS_AS(generate_ray_bundle(pose, 0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(generate_ray_bundle(pose, 181.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(generate_ray_bundle(pose, 90.0, 0), std::invalid_argument);
}

TEST_CASE("unit sphere from its center") {
  const Ray ray{{0, 0, 0}, {1, 0, 0}};
  const auto l = ray_sphere_intersect(ray, {0, 0, 0}, 1.0);
  REQUIRE(l.has_value());
  CHECK(*l == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("collinear sphere returns the near root") {
  const Ray ray{{0, 0, 0}, {1, 0, 0}};
  const auto l = ray_sphere_intersect(ray, {3, 0, 0}, 1.0);
  REQUIRE(l.has_value());
  CHECK(*l == doctest::Approx(2.0).epsilon(1e-12));

  // The +sqrt convention picks the far root; verify it is 4 here.
  const double a = 1.0, b = -6.0, c = 8.0;
  const double far_root = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
  CHECK(far_root == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("miss and behind-origin cases return nothing") {
  const Ray ray{{0, 0, 0}, {1, 0, 0}};
  CHECK(!ray_sphere_intersect(ray, {0, 5, 0}, 1.0).has_value());
  CHECK(!ray_sphere_intersect(ray, {-5, 0, 0}, 1.0).has_value());
  CHECK_THROWS_AS(ray_sphere_intersect(ray, {0, 0, 0}, -1.0), std::invalid_argument);
}

TEST_CASE("intersection point satisfies the sphere equation") {
  SplitMix rng(42);
  int hits = 0;
  for (int i = 0; i < 500; ++i) {
    Ray ray;
    ray.origin = {rng.next_uniform(-2, 2), rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
    ray.direction = normalized({rng.next_uniform(-1, 1), rng.next_uniform(-1, 1), rng.next_uniform(-1, 1)});
    const Point3 center{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
    const double radius = rng.next_uniform(0.1, 3.0);
    const auto l = ray_sphere_intersect(ray, center, radius);
    if (!l) continue;
    ++hits;
    const Point3 hit = ray.origin + *l * ray.direction;
    CHECK(std::abs(norm(hit - center) - radius) < 1e-9);

    // idempotence: intersecting again from the same origin returns the same depth
    const auto l2 = ray_sphere_intersect(ray, center, radius);
    REQUIRE(l2.has_value());
    CHECK(std::abs(*l2 - *l) < 1e-12);
  }
  CHECK(hits > 50);
}

TEST_CASE("sample grid depths equal the bin radii exactly") {
  const auto pose = pose_at(10.0);
  const auto bundle = generate_ray_bundle(pose, 90.0, 8);
  const RangeAxis axis(0.5, 2.0, 16);
  const auto grid = sample_sphere_points(pose, bundle, axis);
  REQUIRE(grid.n_rays == 8);
  REQUIRE(grid.n_bins == 16);
  for (int j = 0; j < grid.n_rays; ++j)
    for (int i = 0; i < grid.n_bins; ++i) {
      CHECK(grid.depth(j, i) == axis.radius(i));
      CHECK(std::abs(norm(grid.point(j, i) - pose.origin) - axis.radius(i)) < 1e-9);
    }
}

TEST_CASE("sampled points stay within standoff + r_max of the scene center") {
  SplitMix rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const double standoff = rng.next_uniform(0.5, 3.0);
    const double angle = rng.next_uniform(0.0, 360.0);
    const auto pose = pose_at(angle, standoff);
    const double r_max = rng.next_uniform(1.0, 2.5);
    const RangeAxis axis(0.2, r_max, 12);
    const auto bundle = generate_ray_bundle(pose, 120.0, 7);
    const auto grid = sample_sphere_points(pose, bundle, axis);
    for (const auto& p : grid.points)
      CHECK(norm(p) <= standoff + r_max + 1e-9);
  }
}
