#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "isar/metrics.hpp"
#include "isar/rng.hpp"

using namespace isar;
using namespace isar::metrics;

namespace {

ReconImage make_image(int w, int h, double fill = 0.0) {
  GridSpec grid;
  grid.width = w;
  grid.height = h;
  ReconImage img(grid);
  for (auto& v : img.pixels) v = fill;
  return img;
}

ReconImage blob_image(int w, int h, std::initializer_list<std::pair<int, int>> centers,
                      double sigma_px = 2.0) {
  auto img = make_image(w, h);
  for (const auto& [cr, cc] : centers)
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const double d2 = (r - cr) * (r - cr) + (c - cc) * (c - cc);
        img.at(r, c) += std::exp(-d2 / (2.0 * sigma_px * sigma_px));
      }
  return img;
}

}  // namespace

TEST_CASE("mse closed forms and oracle") {
  const auto a = make_image(16, 16, 0.0);
  const auto b = make_image(16, 16, 1.0);
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(a, b) == doctest::Approx(1.0).epsilon(1e-15));

  auto x = make_image(16, 16);
  auto y = make_image(16, 16);
  SplitMix rng(1);
  for (std::size_t i = 0; i < x.pixels.size(); ++i) {
    x.pixels[i] = rng.next_double();
    y.pixels[i] = rng.next_double();
  }
  double oracle = 0.0;
  for (std::size_t i = 0; i < x.pixels.size(); ++i)
    oracle += (x.pixels[i] - y.pixels[i]) * (x.pixels[i] - y.pixels[i]);
  oracle /= static_cast<double>(x.pixels.size());
  CHECK(mse(x, y) == doctest::Approx(oracle).epsilon(1e-12));

  const auto small = make_image(8, 8);
  CHECK_THROWS_AS(mse(x, small), std::invalid_argument);
}

TEST_CASE("psnr closed forms") {
  auto a = make_image(16, 16, 0.5);
  auto b = a;
  for (auto& v : b.pixels) v += 0.1;  // mse = 0.01
  CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-12));

  const auto zero = make_image(16, 16, 0.0);
  const auto one = make_image(16, 16, 1.0);
  CHECK(psnr(zero, one) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::isinf(psnr(a, a)));
}

TEST_CASE("psnr decreases as mse grows") {
  const auto a = make_image(16, 16, 0.2);
  double last = std::numeric_limits<double>::infinity();
  for (double off : {0.01, 0.05, 0.1, 0.3, 0.7}) {
    auto b = a;
    for (auto& v : b.pixels) v += off;
    const double p = psnr(a, b);
    CHECK(p < last);
    last = p;
  }
}

TEST_CASE("ssim identity and symmetry") {
  auto a = blob_image(32, 32, {{10, 12}, {20, 25}});
  CHECK(ssim(a, a) == 1.0);

  auto b = blob_image(32, 32, {{12, 10}});
  CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
}

TEST_CASE("inverting a structured image wrecks its ssim") {
  auto a = blob_image(32, 32, {{16, 16}}, 4.0);
  auto inv = a;
  for (auto& v : inv.pixels) v = 1.0 - v;
  CHECK(ssim(a, inv) < 0.5);
}

TEST_CASE("constant images reduce ssim to the luminance term") {
  const double x = 0.25, y = 0.75;
  const auto a = make_image(16, 16, x);
  const auto b = make_image(16, 16, y);
  const double c1 = 0.01 * 0.01;
  const double expected = (2.0 * x * y + c1) / (x * x + y * y + c1);
  CHECK(ssim(a, b) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ssim rejects images smaller than its window") {
  const auto a = make_image(6, 6);
  CHECK_THROWS_AS(ssim(a, a), std::invalid_argument);
}

TEST_CASE("find_peaks on a zero image is empty") {
  const auto img = make_image(32, 32, 0.0);
  CHECK(find_peaks(img, 10, 0.5).empty());
}

TEST_CASE("two blobs 30 px apart give exactly two peaks at their centers") {
  const auto img = blob_image(64, 64, {{32, 17}, {32, 47}});
  const auto peaks = find_peaks(img, 10, 0.5);
  REQUIRE(peaks.size() == 2);
  for (const auto& [r, c] : peaks) {
    CHECK(r == 32);
    const bool near_a = std::abs(c - 17) <= 1;
    const bool near_b = std::abs(c - 47) <= 1;
    CHECK((near_a || near_b));
  }
}

TEST_CASE("a single blob gives a single peak") {
  const auto img = blob_image(64, 64, {{20, 40}});
  const auto peaks = find_peaks(img, 10, 0.3);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].first == 20);
  CHECK(peaks[0].second == 40);
}

TEST_CASE("find_peaks ignores global positive scaling") {
  auto img = blob_image(64, 64, {{12, 12}, {40, 50}});
  const auto base = find_peaks(img, 8, 0.4);
  for (auto& v : img.pixels) v *= 3.7;
  const auto scaled = find_peaks(img, 8, 0.4);
  REQUIRE(base.size() == scaled.size());
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(base[i] == scaled[i]);
}

TEST_CASE("normalize_minmax maps to [0,1] and flattens constants") {
  auto img = make_image(16, 16);
  SplitMix rng(9);
  for (auto& v : img.pixels) v = rng.next_uniform(-3.0, 5.0);
  const auto n = normalize_minmax(img);
  double lo = 1e300, hi = -1e300;
  for (double v : n.pixels) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo == 0.0);
  CHECK(hi == 1.0);

  const auto flat = normalize_minmax(make_image(16, 16, 4.2));
  for (double v : flat.pixels) CHECK(v == 0.0);
}

TEST_CASE("evaluate produces a serializable report") {
  const auto truth = blob_image(32, 32, {{16, 10}, {16, 22}});
  auto recon = truth;
  SplitMix rng(17);
  for (auto& v : recon.pixels) v += rng.next_uniform(-0.05, 0.05);
  const auto report = evaluate(recon, truth, 5, 0.4);
  CHECK(report.mse > 0.0);
  CHECK(report.psnr_db > 10.0);
  CHECK(report.ssim > 0.5);
  CHECK(report.peak_count == 2);
  const auto kv = report.to_kv();
  CHECK(kv.find("psnr_db=") != std::string::npos);
  CHECK(kv.find("peak_count=2") != std::string::npos);
  CHECK(MetricReport::csv_header() == "psnr_db,mse,ssim,peak_count");
  CHECK(report.to_csv_row().find(',') != std::string::npos);
}
