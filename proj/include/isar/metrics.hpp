#pragma once

#include <string>
#include <utility>
#include <vector>

#include "isar/image.hpp"

namespace isar::metrics {

struct MetricReport {
  double psnr_db = 0.0;
  double mse = 0.0;
  double ssim = 0.0;
  int peak_count = 0;
  std::vector<std::pair<int, int>> peak_positions;  // (row, col), value-descending

  std::string to_kv() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

// Shared normalization convention: min-max to [0, 1]. Constant images map
// to all zeros.
ReconImage normalize_minmax(const ReconImage& img);

// Inputs are expected min-max normalized.
double mse(const ReconImage& a, const ReconImage& b);
double psnr(const ReconImage& a, const ReconImage& b);  // +inf when mse == 0

// Mean local SSIM over sliding 8x8 windows, c1 = 0.01^2, c2 = 0.03^2.
double ssim(const ReconImage& a, const ReconImage& b);

// Local maxima above threshold_fraction * max(img), greedily kept by value
// with non-maximum suppression of radius min_separation_px.
std::vector<std::pair<int, int>> find_peaks(const ReconImage& img, int min_separation_px,
                                            double threshold_fraction);

// Normalizes both images, compares them, and runs peak finding on the
// normalized reconstruction.
MetricReport evaluate(const ReconImage& recon, const ReconImage& truth,
                      int min_separation_px = 10, double threshold_fraction = 0.3);

}  // namespace isar::metrics
