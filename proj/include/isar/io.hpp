#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "isar/image.hpp"
#include "isar/sim.hpp"

namespace isar::io {

// All writers go through a temp file + rename so readers never observe a
// partially written result.
void write_file_atomic(const std::string& path, std::string_view bytes);

// Sinogram container, little-endian:
//   "ISGM" | u16 version | u32 n_angles | u32 n_bins | f64 r_min | f64 r_max
//   | f64 angles[n_angles] | f32 data[n_angles * n_bins] row-major
void write_sinogram(const sim::Sinogram& s, const std::string& path);
sim::Sinogram read_sinogram(const std::string& path);

// Lossless CSV twin of the binary container (17 significant digits).
void write_sinogram_csv(const sim::Sinogram& s, const std::string& path);
sim::Sinogram read_sinogram_csv(const std::string& path);

// Raw float image sidecar:
//   "IFLT" | u32 width | u32 height | f64 extent | f32 pixels row-major
void write_image_raw(const ReconImage& img, const std::string& path);
ReconImage read_image_raw(const std::string& path);

// 8-bit binary PGM, min-max normalized. db_floor < 0 applies a dynamic-range
// clip (e.g. -30 dB) before normalization; 0 keeps the linear scale.
void write_image_pgm(const ReconImage& img, const std::string& path, double db_floor = 0.0);

// FNV-1a over the file bytes; used for determinism checks.
std::uint64_t file_hash(const std::string& path);

}  // namespace isar::io
