#pragma once

#include <cmath>

#include "isar/geometry.hpp"

namespace isar::testutil {

inline RadarPose pose_at(double angle_deg, double standoff = 1.0) {
  const double phi = angle_deg * M_PI / 180.0;
  RadarPose p;
  p.origin = {standoff * std::cos(phi), standoff * std::sin(phi), 0.0};
  p.boresight = {-std::cos(phi), -std::sin(phi), 0.0};
  p.aperture_angle_deg = angle_deg;
  return p;
}

}  // namespace isar::testutil
