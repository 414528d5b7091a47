#include "isar/recon.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <exception>

#include "isar/rng.hpp"

namespace isar::recon {

namespace {

std::vector<double> backproject_raw_impl(const sim::Sinogram& s,
                                         const std::vector<RadarPose>& poses,
                                         const GridSpec& grid, bool parallel) {
  validate_grid(grid);
  if (static_cast<int>(poses.size()) != s.n_angles())
    throw std::invalid_argument("backproject: pose count != sinogram row count");
  const int n_bins = s.n_bins();
  const double r_min = s.axis.r_min;
  const double inv_spacing = 1.0 / s.axis.spacing();
  const int npx = grid.width * grid.height;
  std::vector<double> acc(npx, 0.0);
#pragma omp parallel for schedule(static) if (parallel)
  for (int px = 0; px < npx; ++px) {
    const int r = px / grid.width;
    const int c = px % grid.width;
    const Point3 p = grid.pixel_center(r, c);
    double sum = 0.0;
    for (std::size_t k = 0; k < poses.size(); ++k) {
      const double range = norm(p - poses[k].origin);
      const double u = (range - r_min) * inv_spacing;
      if (u < 0.0 || u > n_bins - 1) continue;
      const double* row = s.row(static_cast<int>(k));
      const int i0 = static_cast<int>(u);
      if (i0 >= n_bins - 1) {
        sum += row[n_bins - 1];
      } else {
        const double w = u - i0;
        sum += row[i0] * (1.0 - w) + row[i0 + 1] * w;
      }
    }
    acc[px] = sum;
  }
  return acc;
}

ReconImage magnitude_image(std::vector<double>&& acc, const GridSpec& grid) {
  ReconImage img(grid);
  for (std::size_t i = 0; i < acc.size(); ++i) img.pixels[i] = std::abs(acc[i]);
  return img;
}

}  // namespace

std::vector<double> backproject_raw(const sim::Sinogram& s,
                                    const std::vector<RadarPose>& poses,
                                    const GridSpec& grid) {
  return backproject_raw_impl(s, poses, grid, true);
}

ReconImage backproject(const sim::Sinogram& s, const std::vector<RadarPose>& poses,
                       const GridSpec& grid) {
  return magnitude_image(backproject_raw_impl(s, poses, grid, true), grid);
}

ReconImage backproject_serial(const sim::Sinogram& s, const std::vector<RadarPose>& poses,
                              const GridSpec& grid) {
  return magnitude_image(backproject_raw_impl(s, poses, grid, false), grid);
}

double scan_loss(std::span<const double> estimated, std::span<const double> measured) {
  if (estimated.size() != measured.size())
    throw std::invalid_argument("scan_loss: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const double d = estimated[i] - measured[i];
    acc += d * d;
  }
  return acc / static_cast<double>(estimated.size());
}

bool adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, const TrainConfig& cfg) {
  if (params.size() != grads.size())
    throw std::invalid_argument("adam_step: parameter/gradient shape mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size())
    throw std::invalid_argument("adam_step: state shape mismatch");
  for (double g : grads)
    if (!std::isfinite(g)) return false;

  state.step += 1;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const double lr = cfg.learning_rate;
  const double eps = cfg.adam_eps;
  const std::size_t n = params.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    params[i] -= lr * (state.m[i] / corr1) / (std::sqrt(state.v[i] / corr2) + eps);
  }
  return true;
}

AtsResult ats_reconstruct(const sim::Sinogram& s, const std::vector<RadarPose>& poses,
                          const GridSpec& grid, const field::FieldConfig& field_cfg,
                          const fwd::RenderConfig& render_cfg, const TrainConfig& train_cfg) {
  validate_grid(grid);
  if (static_cast<int>(poses.size()) != s.n_angles())
    throw std::invalid_argument("ats_reconstruct: pose count != sinogram row count");
  if (train_cfg.n_steps < 1 || train_cfg.scans_per_step < 1 || train_cfg.learning_rate <= 0.0)
    throw std::invalid_argument("ats_reconstruct: invalid training configuration");

  field::FieldParams params(field_cfg, mix_seed(train_cfg.seed, 0xF1));
  AdamState state;
  std::vector<double> history;
  history.reserve(train_cfg.n_steps);

  const int S = train_cfg.scans_per_step;
  const int n_bins = s.n_bins();
  std::vector<field::FieldGradient> scan_grads(S);
  std::vector<double> scan_losses(S, 0.0);
  std::vector<int> picked(S, 0);
  std::vector<std::exception_ptr> scan_errors(S);
  field::FieldGradient total(params.size(), 0.0);
  double last_finite = 0.0;
  TrainConfig step_cfg = train_cfg;

  for (int step = 0; step < train_cfg.n_steps; ++step) {
    SplitMix pick(mix_seed(train_cfg.seed, 0x5A000000ULL + static_cast<std::uint64_t>(step)));
    for (int k = 0; k < S; ++k)
      picked[k] = static_cast<int>(pick.next_below(poses.size()));

#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < S; ++k) {
      try {
        const auto scan = fwd::render_scan(params, poses[picked[k]], render_cfg, s.axis);
        const double* measured = s.row(picked[k]);
        scan_losses[k] = scan_loss(scan.row, {measured, static_cast<std::size_t>(n_bins)});
        std::vector<double> d_row(n_bins);
        const double scale = 2.0 / (static_cast<double>(n_bins) * S);
        for (int i = 0; i < n_bins; ++i) d_row[i] = scale * (scan.row[i] - measured[i]);
        if (scan_grads[k].size() != params.size())
          scan_grads[k].assign(params.size(), 0.0);
        else
          std::fill(scan_grads[k].begin(), scan_grads[k].end(), 0.0);
        fwd::scan_backward(scan, d_row, scan_grads[k]);
        scan_errors[k] = nullptr;
      } catch (...) {
        scan_errors[k] = std::current_exception();
      }
    }
    for (int k = 0; k < S; ++k)
      if (scan_errors[k]) {
        try {
          std::rethrow_exception(scan_errors[k]);
        } catch (const std::exception& e) {
          throw TrainingDiverged(step, last_finite,
                                 std::string("ats_reconstruct: ") + e.what());
        }
      }

    double loss = 0.0;
    for (int k = 0; k < S; ++k) loss += scan_losses[k];
    loss /= S;
    if (!std::isfinite(loss))
      throw TrainingDiverged(step, last_finite, "ats_reconstruct: loss diverged");
    last_finite = loss;
    history.push_back(loss);

    std::fill(total.begin(), total.end(), 0.0);
    for (int k = 0; k < S; ++k) {
      const auto& g = scan_grads[k];
      for (std::size_t i = 0; i < total.size(); ++i) total[i] += g[i];
    }
    step_cfg.learning_rate =
        train_cfg.learning_rate * std::pow(train_cfg.lr_decay, static_cast<double>(step));
    if (!adam_step(params.values(), total, state, step_cfg))
      std::fprintf(stderr, "ats_reconstruct: non-finite gradient at step %d, update skipped\n", step);
  }

  // soft convergence check over trailing windows
  if (history.size() >= 200) {
    double tail = 0.0, prev = 0.0;
    for (std::size_t i = history.size() - 100; i < history.size(); ++i) tail += history[i];
    for (std::size_t i = history.size() - 200; i < history.size() - 100; ++i) prev += history[i];
    if (tail > prev * 1.05)
      std::fprintf(stderr, "ats_reconstruct: loss not settling (trailing mean %.3g vs %.3g)\n",
                   tail / 100.0, prev / 100.0);
  }

  AtsResult result{extract_image(params, grid), std::move(params), std::move(history)};
  return result;
}

namespace {

ReconImage extract_impl(const field::FieldParams& params, const GridSpec& grid, bool parallel) {
  validate_grid(grid);
  ReconImage img(grid);
  const int npx = grid.width * grid.height;
#pragma omp parallel for schedule(static) if (parallel)
  for (int px = 0; px < npx; ++px) {
    const int r = px / grid.width;
    const int c = px % grid.width;
    img.pixels[px] = field::field_eval(params, grid.pixel_center(r, c));
  }
  return img;
}

}  // namespace

ReconImage extract_image(const field::FieldParams& params, const GridSpec& grid) {
  return extract_impl(params, grid, true);
}

ReconImage extract_image_serial(const field::FieldParams& params, const GridSpec& grid) {
  return extract_impl(params, grid, false);
}

}  // namespace isar::recon
