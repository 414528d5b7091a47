#include "isar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace isar::metrics {

namespace {

void check_same_shape(const ReconImage& a, const ReconImage& b, const char* who) {
  if (a.grid.width != b.grid.width || a.grid.height != b.grid.height)
    throw std::invalid_argument(std::string(who) + ": image dimensions differ");
}

constexpr int kWindow = 8;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

}  // namespace

ReconImage normalize_minmax(const ReconImage& img) {
  ReconImage out = img;
  if (out.pixels.empty()) return out;
  double lo = out.pixels[0], hi = out.pixels[0];
  for (double v : out.pixels) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi > lo) {
    const double span = hi - lo;
    for (auto& v : out.pixels) v = (v - lo) / span;
  } else {
    for (auto& v : out.pixels) v = 0.0;
  }
  return out;
}

double mse(const ReconImage& a, const ReconImage& b) {
  check_same_shape(a, b, "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = a.pixels[i] - b.pixels[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.pixels.size());
}

double psnr(const ReconImage& a, const ReconImage& b) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / m);
}

double ssim(const ReconImage& a, const ReconImage& b) {
  check_same_shape(a, b, "ssim");
  const int W = a.grid.width, H = a.grid.height;
  if (W < kWindow || H < kWindow)
    throw std::invalid_argument("ssim: image smaller than the 8x8 window");
  const double n = kWindow * kWindow;
  double total = 0.0;
  int windows = 0;
  for (int r0 = 0; r0 + kWindow <= H; ++r0)
    for (int c0 = 0; c0 + kWindow <= W; ++c0) {
      double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
      for (int r = r0; r < r0 + kWindow; ++r)
        for (int c = c0; c < c0 + kWindow; ++c) {
          const double va = a.at(r, c), vb = b.at(r, c);
          sa += va;
          sb += vb;
          saa += va * va;
          sbb += vb * vb;
          sab += va * vb;
        }
      const double mu_a = sa / n, mu_b = sb / n;
      const double var_a = saa / n - mu_a * mu_a;
      const double var_b = sbb / n - mu_b * mu_b;
      const double cov = sab / n - mu_a * mu_b;
      const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
      const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
      total += num / den;
      ++windows;
    }
  return total / windows;
}

std::vector<std::pair<int, int>> find_peaks(const ReconImage& img, int min_separation_px,
                                            double threshold_fraction) {
  const int W = img.grid.width, H = img.grid.height;
  double maxv = 0.0;
  for (double v : img.pixels) maxv = std::max(maxv, v);
  if (maxv <= 0.0) return {};
  const double threshold = threshold_fraction * maxv;

  struct Candidate {
    double value;
    int row, col;
  };
  std::vector<Candidate> candidates;
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      const double v = img.at(r, c);
      if (v < threshold) continue;
      bool is_max = true;
      for (int dr = -1; dr <= 1 && is_max; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= H || cc < 0 || cc >= W) continue;
          if (img.at(rr, cc) > v) {
            is_max = false;
            break;
          }
        }
      if (is_max) candidates.push_back({v, r, c});
    }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });

  std::vector<std::pair<int, int>> peaks;
  const double min_sep2 = static_cast<double>(min_separation_px) * min_separation_px;
  for (const auto& cand : candidates) {
    bool suppressed = false;
    for (const auto& kept : peaks) {
      const double dr = cand.row - kept.first;
      const double dc = cand.col - kept.second;
      if (dr * dr + dc * dc < min_sep2) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) peaks.emplace_back(cand.row, cand.col);
  }
  return peaks;
}

MetricReport evaluate(const ReconImage& recon, const ReconImage& truth,
                      int min_separation_px, double threshold_fraction) {
  const ReconImage a = normalize_minmax(recon);
  const ReconImage b = normalize_minmax(truth);
  MetricReport report;
  report.mse = mse(a, b);
  report.psnr_db = psnr(a, b);
  report.ssim = ssim(a, b);
  report.peak_positions = find_peaks(a, min_separation_px, threshold_fraction);
  report.peak_count = static_cast<int>(report.peak_positions.size());
  return report;
}

std::string MetricReport::to_kv() const {
  std::ostringstream out;
  out.precision(10);
  out << "psnr_db=" << psnr_db << "\n";
  out << "mse=" << mse << "\n";
  out << "ssim=" << ssim << "\n";
  out << "peak_count=" << peak_count << "\n";
  out << "peaks=";
  for (std::size_t i = 0; i < peak_positions.size(); ++i) {
    if (i) out << ';';
    out << peak_positions[i].first << ':' << peak_positions[i].second;
  }
  out << "\n";
  return out.str();
}

std::string MetricReport::csv_header() { return "psnr_db,mse,ssim,peak_count"; }

std::string MetricReport::to_csv_row() const {
  std::ostringstream out;
  out.precision(10);
  out << psnr_db << ',' << mse << ',' << ssim << ',' << peak_count;
  return out.str();
}

}  // namespace isar::metrics
