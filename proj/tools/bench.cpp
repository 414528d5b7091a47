#include <omp.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "isar/field.hpp"
#include "isar/forward.hpp"
#include "isar/recon.hpp"
#include "isar/sim.hpp"

using namespace isar;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <typename F>
double time_ms(F&& fn, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = omp_get_wtime();
    fn();
    best = std::min(best, (omp_get_wtime() - t0) * 1e3);
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms, double diff) {
  std::printf("%-22s serial %8.2f ms   parallel %8.2f ms   speedup %4.2fx   max|diff| %g\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms, diff);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  sim::PointTargetScene scene;
  scene.targets = {{{0.15, 0.15, 0.0}, 1.0}, {{-0.15, -0.15, 0.0}, 1.0}};
  const auto poses = virtual_radar_positions(360, 1.0, 1.0, 360.0);
  const RangeAxis axis(0.3, 1.7, 160);
  const PulseParams pulse = default_pulse();

  sim::Sinogram sino_par, sino_ser;
  const double t_sim_par = time_ms([&] { sino_par = sim::simulate_sinogram(scene, poses, pulse, axis); });
  const double t_sim_ser = time_ms([&] { sino_ser = sim::simulate_sinogram_serial(scene, poses, pulse, axis); });
  report("simulate_sinogram", t_sim_ser, t_sim_par, max_abs_diff(sino_par.data, sino_ser.data));

  GridSpec grid;
  ReconImage bp_par, bp_ser;
  const double t_bp_par = time_ms([&] { bp_par = recon::backproject(sino_par, poses, grid); });
  const double t_bp_ser = time_ms([&] { bp_ser = recon::backproject_serial(sino_par, poses, grid); });
  report("backproject", t_bp_ser, t_bp_par, max_abs_diff(bp_par.pixels, bp_ser.pixels));

  field::FieldConfig field_cfg;
  field::FieldParams params(field_cfg, 7);
  ReconImage ex_par, ex_ser;
  const double t_ex_par = time_ms([&] { ex_par = recon::extract_image(params, grid); });
  const double t_ex_ser = time_ms([&] { ex_ser = recon::extract_image_serial(params, grid); });
  report("extract_image", t_ex_ser, t_ex_par, max_abs_diff(ex_par.pixels, ex_ser.pixels));

  // one training step: render + backward over a scan batch
  fwd::RenderConfig render;
  render.pulse = pulse;
  recon::TrainConfig train;
  train.n_steps = 4;
  train.scans_per_step = 8;
  auto run_steps = [&] {
    (void)recon::ats_reconstruct(sino_par, poses, grid, field_cfg, render, train);
  };
  const int max_threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const double t_step_ser = time_ms(run_steps, 1);
  omp_set_num_threads(max_threads);
  const double t_step_par = time_ms(run_steps, 1);
  report("train_steps(4x8)", t_step_ser, t_step_par, 0.0);
  std::printf("per-step (parallel): %.1f ms\n", t_step_par / train.n_steps);

  return 0;
}
