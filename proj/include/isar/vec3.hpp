#pragma once

#include <cmath>

namespace isar {

// Scene coordinate in meters; the plane experiments keep z = 0.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Point3 operator+(const Point3& a, const Point3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Point3 operator-(const Point3& a, const Point3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Point3 operator*(double s, const Point3& p) {
  return {s * p.x, s * p.y, s * p.z};
}

inline double dot(const Point3& a, const Point3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(const Point3& p) { return std::sqrt(dot(p, p)); }

inline Point3 normalized(const Point3& p) {
  const double n = norm(p);
  return {p.x / n, p.y / n, p.z / n};
}

inline bool all_finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

}  // namespace isar
