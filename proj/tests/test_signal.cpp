#include <cmath>
#include <complex>
#include <stdexcept>

#include "doctest.h"
#include "isar/rng.hpp"
#include "isar/signal.hpp"

using namespace isar;

TEST_CASE("pulse at t = 0 is 1") {
  PulseParams p{4.3e9, 3e-10};
  CHECK(pulse(0.0, p) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pulse vanishes at quarter carrier period") {
  PulseParams p{4.3e9, 3e-10};
  const double t = 1.0 / (4.0 * p.f_c);
  const double env = std::exp(-t * t / (2.0 * p.tau0 * p.tau0));
  CHECK(std::abs(pulse(t, p) / env) < 1e-12);
}

TEST_CASE("pulse closed form at t = tau0 with one carrier cycle per tau0") {
  // 2 pi f_c tau0 = 2 pi  =>  f_c = 1 / tau0
  const double tau0 = 1e-9;
  PulseParams p{1.0 / tau0, tau0};
  const double expected = std::exp(-0.5);  // cos(2 pi) = 1
  CHECK(pulse(tau0, p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("pulse is even and bounded by its envelope") {
  PulseParams p = default_pulse();
  SplitMix rng(7);
  for (int i = 0; i < 200; ++i) {
    const double t = rng.next_uniform(-2e-9, 2e-9);
    CHECK(pulse(-t, p) == pulse(t, p));
    const double env = std::exp(-t * t / (2.0 * p.tau0 * p.tau0));
    CHECK(std::abs(pulse(t, p)) <= env + 1e-15);
  }
}

TEST_CASE("range_to_delay") {
  CHECK(range_to_delay(0.0) == 0.0);
  CHECK(range_to_delay(kSpeedOfLight / 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(range_to_delay(1.5) == doctest::Approx(1.0007e-8).epsilon(1e-4));
  CHECK_THROWS_AS(range_to_delay(-1.0), std::invalid_argument);
}

TEST_CASE("default pulse carrier and bandwidth") {
  const PulseParams p = default_pulse();
  CHECK(p.f_c == 4.3e9);

  // DFT oracle: sample the pulse densely and evaluate the spectrum at the
  // carrier and at the band edges; the edges must sit at -10 dB +/- 1 dB.
  const double dt = 5e-12;
  const int n = 4096;  // covers +/- 10 ns, far beyond the envelope
  auto spectrum_mag = [&](double freq) {
    std::complex<double> acc{0.0, 0.0};
    for (int i = -n; i <= n; ++i) {
      const double t = i * dt;
      acc += pulse(t, p) * std::exp(std::complex<double>(0.0, -2.0 * M_PI * freq * t));
    }
    return std::abs(acc);
  };
  const double peak = spectrum_mag(p.f_c);
  const double lo = spectrum_mag(p.f_c - 0.85e9);
  const double hi = spectrum_mag(p.f_c + 0.85e9);
  const double db_lo = 20.0 * std::log10(lo / peak);
  const double db_hi = 20.0 * std::log10(hi / peak);
  CHECK(db_lo == doctest::Approx(-10.0).epsilon(0.1));
  CHECK(db_hi == doctest::Approx(-10.0).epsilon(0.1));

  // pulse energy
  double energy = 0.0;
  for (int i = -n; i <= n; ++i) {
    const double s = pulse(i * dt, p);
    energy += s * s * dt;
  }
  CHECK(energy > 0.0);
}

TEST_CASE("range axis bins are strictly increasing and uniform") {
  RangeAxis axis(0.3, 1.7, 160);
  CHECK(axis.radius(0) == doctest::Approx(0.3));
  CHECK(axis.radius(159) == doctest::Approx(1.7));
  const auto r = axis.radii();
  for (int i = 1; i < axis.n_bins; ++i) {
    CHECK(r[i] > r[i - 1]);
    CHECK(r[i] - r[i - 1] == doctest::Approx(axis.spacing()).epsilon(1e-12));
  }
}

TEST_CASE("range axis rejects bad parameters") {
  CHECK_THROWS_AS(RangeAxis(0.0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(RangeAxis(1.0, 0.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(RangeAxis(0.5, 1.0, 1), std::invalid_argument);
}
