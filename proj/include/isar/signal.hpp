#pragma once

#include <vector>

namespace isar {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Transmit pulse: Gaussian envelope of standard deviation tau0 around a
// cosine carrier at f_c.
struct PulseParams {
  double f_c = 4.3e9;     // Hz
  double tau0 = 2.84e-10; // s
};

// exp(-t^2 / (2 tau0^2)) * cos(2 pi f_c t)
double pulse(double t, const PulseParams& p);

// Two-way time of flight 2R/c for a point at range R.
double range_to_delay(double range_m);

// P440-like band: 4.3 GHz center, tau0 set so the spectral envelope is
// 10 dB down at +/- 0.85 GHz from the carrier.
PulseParams default_pulse();

// Uniformly spaced radial range bins over [r_min, r_max].
struct RangeAxis {
  double r_min = 0.3;
  double r_max = 1.7;
  int n_bins = 160;

  RangeAxis() = default;
  RangeAxis(double r_min_m, double r_max_m, int bins);

  double spacing() const;
  // Out of line so every translation unit sees bit-identical radii.
  double radius(int i) const;
  std::vector<double> radii() const;
};

}  // namespace isar
