#pragma once

#include <stdexcept>
#include <vector>

#include "isar/vec3.hpp"

namespace isar {

// Reconstruction domain: a square of half-width `extent` meters around
// `center`, discretized to width x height pixels.
struct GridSpec {
  int width = 128;
  int height = 128;
  double extent = 0.5;  // half-width, m
  Point3 center{0.0, 0.0, 0.0};

  double pixel_pitch() const { return 2.0 * extent / width; }

  // World coordinate of the pixel center; row 0 is the -y edge.
  Point3 pixel_center(int row, int col) const {
    const double x = center.x + ((col + 0.5) / width - 0.5) * 2.0 * extent;
    const double y = center.y + ((row + 0.5) / height - 0.5) * 2.0 * extent;
    return {x, y, center.z};
  }
};

struct ReconImage {
  std::vector<double> pixels;  // height * width, row-major
  GridSpec grid;

  ReconImage() = default;
  explicit ReconImage(const GridSpec& g)
      : pixels(static_cast<std::size_t>(g.height) * g.width, 0.0), grid(g) {}

  double& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * grid.width + col]; }
  double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * grid.width + col]; }
};

inline void validate_grid(const GridSpec& g) {
  if (g.width < 8 || g.height < 8)
    throw std::invalid_argument("GridSpec: width and height must be >= 8");
  if (g.extent <= 0.0) throw std::invalid_argument("GridSpec: extent must be positive");
}

}  // namespace isar
