#include "isar/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace isar {

double pulse(double t, const PulseParams& p) {
  const double env = std::exp(-(t * t) / (2.0 * p.tau0 * p.tau0));
  return env * std::cos(2.0 * M_PI * p.f_c * t);
}

double range_to_delay(double range_m) {
  if (range_m < 0.0) throw std::invalid_argument("range_to_delay: negative range");
  return 2.0 * range_m / kSpeedOfLight;
}

PulseParams default_pulse() {
  PulseParams p;
  p.f_c = 4.3e9;
  // Gaussian spectral envelope exp(-2 pi^2 tau0^2 df^2) hits -10 dB
  // (amplitude ratio 10^-0.5) at df = 0.85e9, i.e. the 3.1-4.8 GHz band.
  p.tau0 = std::sqrt(std::log(10.0)) / (2.0 * M_PI * 0.85e9);
  return p;
}

RangeAxis::RangeAxis(double r_min_m, double r_max_m, int bins)
    : r_min(r_min_m), r_max(r_max_m), n_bins(bins) {
  if (!(0.0 < r_min && r_min < r_max))
    throw std::invalid_argument("RangeAxis: need 0 < r_min < r_max");
  if (n_bins < 2) throw std::invalid_argument("RangeAxis: need n_bins >= 2");
}

double RangeAxis::spacing() const { return (r_max - r_min) / (n_bins - 1); }

double RangeAxis::radius(int i) const { return r_min + i * spacing(); }

std::vector<double> RangeAxis::radii() const {
  std::vector<double> r(n_bins);
  for (int i = 0; i < n_bins; ++i) r[i] = radius(i);
  return r;
}

}  // namespace isar
