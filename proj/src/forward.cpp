#include "isar/forward.hpp"

#include <cmath>
#include <stdexcept>

namespace isar::fwd {

namespace {

// Pulse evaluated at bin offsets: kernel[(n-1) + d] corresponds to a range
// offset of d bins.
std::vector<double> pulse_kernel(const RenderConfig& cfg, const RangeAxis& axis) {
  const int n = axis.n_bins;
  std::vector<double> kernel(2 * n - 1);
  for (int d = -(n - 1); d <= n - 1; ++d) {
    const double t = 2.0 * (d * axis.spacing()) / kSpeedOfLight;
    kernel[(n - 1) + d] = pulse(t, cfg.pulse);
  }
  return kernel;
}

std::vector<double> convolve(std::span<const double> hist, std::span<const double> kernel) {
  const int n = static_cast<int>(hist.size());
  std::vector<double> out(n, 0.0);
  for (int m = 0; m < n; ++m) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += hist[i] * kernel[(n - 1) + m - i];
    out[m] = acc;
  }
  return out;
}

// adjoint of convolve
std::vector<double> correlate(std::span<const double> d_row, std::span<const double> kernel) {
  const int n = static_cast<int>(d_row.size());
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int m = 0; m < n; ++m) acc += d_row[m] * kernel[(n - 1) + m - i];
    out[i] = acc;
  }
  return out;
}

// Shared value path: histogram + transmission over the lattice, then the
// optional pulse smoothing.
std::vector<double> render_rows(const ScanGeometry& geom, std::span<const double> sigmas,
                                const RenderConfig& cfg, const RangeAxis& axis,
                                std::vector<double>* trans_out) {
  const int n_rays = geom.n_rays;
  const int n_bins = geom.n_bins;
  if (static_cast<int>(sigmas.size()) != n_rays * n_bins)
    throw std::invalid_argument("render: sigma lattice size mismatch");

  const double two_way = cfg.include_two_way_factor ? 2.0 : 1.0;
  const double spacing = axis.spacing();
  std::vector<double> hist(n_bins, 0.0);
  if (trans_out) trans_out->assign(static_cast<std::size_t>(n_rays) * n_bins, 1.0);

  for (int j = 0; j < n_rays; ++j) {
    const double cj = geom.ray_weights[j] * two_way * cfg.lambertian_cosine / n_rays;
    const double* sig = sigmas.data() + static_cast<std::size_t>(j) * n_bins;
    double T = 1.0;
    for (int i = 0; i < n_bins; ++i) {
      if (i > 0 && !cfg.force_unit_transmission) T *= std::exp(-sig[i - 1] * spacing);
      if (trans_out) (*trans_out)[static_cast<std::size_t>(j) * n_bins + i] = T;
      hist[i] += cj * T * sig[i];
    }
  }

  if (!cfg.smooth_with_pulse) return hist;
  return convolve(hist, pulse_kernel(cfg, axis));
}

}  // namespace

std::vector<double> transmission(std::span<const double> sigmas,
                                 std::span<const double> depths) {
  if (sigmas.size() != depths.size())
    throw std::invalid_argument("transmission: sigma/depth length mismatch");
  const int n = static_cast<int>(sigmas.size());
  for (int i = 1; i < n; ++i)
    if (!(depths[i] > depths[i - 1]))
      throw std::invalid_argument("transmission: depths must be strictly increasing");
  std::vector<double> T(n, 1.0);
  for (int i = 1; i < n; ++i)
    T[i] = T[i - 1] * std::exp(-std::abs(sigmas[i - 1]) * std::abs(depths[i] - depths[i - 1]));
  return T;
}

double lambertian(double sigma, double transmission, double ray_cosine) {
  return sigma * ray_cosine * 2.0 * transmission;
}

ScanGeometry make_scan_geometry(const RadarPose& pose, const RenderConfig& cfg,
                                const RangeAxis& axis, double domain_extent) {
  ScanGeometry geom;
  const RayBundle bundle = generate_ray_bundle(pose, cfg.beamwidth_deg, cfg.n_rays);
  geom.grid = sample_sphere_points(pose, bundle, axis);
  geom.n_rays = geom.grid.n_rays;
  geom.n_bins = geom.grid.n_bins;

  geom.ray_weights.resize(geom.n_rays);
  for (int j = 0; j < geom.n_rays; ++j) {
    const double c = dot(bundle.rays[j].direction, pose.boresight);
    geom.ray_weights[j] =
        cfg.directivity_exponent == 0.0 ? 1.0 : std::pow(std::max(c, 0.0), cfg.directivity_exponent);
  }

  const std::size_t n = geom.grid.points.size();
  geom.inside.resize(n);
  geom.dense_index.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point3& p = geom.grid.points[i];
    const bool in = std::abs(p.x) <= domain_extent && std::abs(p.y) <= domain_extent;
    geom.inside[i] = in ? 1 : 0;
    if (in) {
      geom.dense_index[i] = static_cast<std::int32_t>(geom.inside_points.size());
      geom.inside_points.push_back(p);
    }
  }
  return geom;
}

std::vector<double> render_from_lattice(const ScanGeometry& geom,
                                        std::span<const double> sigmas,
                                        const RenderConfig& cfg, const RangeAxis& axis) {
  return render_rows(geom, sigmas, cfg, axis, nullptr);
}

FieldScan render_scan(const field::FieldParams& params, const RadarPose& pose,
                      const RenderConfig& cfg, const RangeAxis& axis) {
  FieldScan scan;
  scan.cfg = cfg;
  scan.axis = axis;
  scan.geom = make_scan_geometry(pose, cfg, axis, params.config().domain_extent);

  auto [dense_sigmas, tape] = field::field_eval_batch(params, scan.geom.inside_points);
  scan.tape = std::move(tape);

  scan.sigmas.assign(scan.geom.grid.points.size(), 0.0);
  for (std::size_t i = 0; i < scan.sigmas.size(); ++i)
    if (scan.geom.dense_index[i] >= 0) scan.sigmas[i] = dense_sigmas[scan.geom.dense_index[i]];

  scan.row = render_rows(scan.geom, scan.sigmas, cfg, axis, &scan.trans);
  return scan;
}

void scan_backward(const FieldScan& scan, std::span<const double> d_row,
                   field::FieldGradient& grad) {
  const int n_rays = scan.geom.n_rays;
  const int n_bins = scan.geom.n_bins;
  if (static_cast<int>(d_row.size()) != n_bins)
    throw std::invalid_argument("scan_backward: d_row length mismatch");

  std::vector<double> d_hist(d_row.begin(), d_row.end());
  if (scan.cfg.smooth_with_pulse)
    d_hist = correlate(d_row, pulse_kernel(scan.cfg, scan.axis));

  const double two_way = scan.cfg.include_two_way_factor ? 2.0 : 1.0;
  const double spacing = scan.axis.spacing();

  // d(loss)/d(sigma) over the lattice:
  //   direct term   c_j * d_hist[k] * T_jk
  //   shadow term  -c_j * spacing * sum_{i>k} d_hist[i] * T_ji * sigma_ji
  std::vector<double> d_sigma(static_cast<std::size_t>(n_rays) * n_bins, 0.0);
  for (int j = 0; j < n_rays; ++j) {
    const double cj = scan.geom.ray_weights[j] * two_way * scan.cfg.lambertian_cosine / n_rays;
    const double* sig = scan.sigmas.data() + static_cast<std::size_t>(j) * n_bins;
    const double* T = scan.trans.data() + static_cast<std::size_t>(j) * n_bins;
    double* ds = d_sigma.data() + static_cast<std::size_t>(j) * n_bins;
    double suffix = 0.0;
    for (int k = n_bins - 1; k >= 0; --k) {
      ds[k] = cj * d_hist[k] * T[k];
      if (!scan.cfg.force_unit_transmission) {
        ds[k] -= cj * spacing * suffix;
        suffix += d_hist[k] * T[k] * sig[k];
      }
    }
  }

  // gather the in-domain upstream sensitivities and push through the field
  std::vector<double> upstream(scan.geom.inside_points.size(), 0.0);
  for (std::size_t i = 0; i < d_sigma.size(); ++i)
    if (scan.geom.dense_index[i] >= 0) upstream[scan.geom.dense_index[i]] = d_sigma[i];
  field::backpropagate_into(scan.tape, upstream, grad);
}

sim::Sinogram render_sinogram(const field::FieldParams& params,
                              const std::vector<RadarPose>& poses,
                              const RenderConfig& cfg, const RangeAxis& axis) {
  if (poses.empty()) throw std::invalid_argument("render_sinogram: no poses");
  sim::Sinogram s;
  s.axis = axis;
  s.angles_deg.resize(poses.size());
  s.data.resize(poses.size() * static_cast<std::size_t>(axis.n_bins));
  const int n = static_cast<int>(poses.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n; ++k) {
    s.angles_deg[k] = poses[k].aperture_angle_deg;
    const auto geom = make_scan_geometry(poses[k], cfg, axis, params.config().domain_extent);
    const auto dense = field::field_eval_values(params, geom.inside_points);
    std::vector<double> sigmas(geom.grid.points.size(), 0.0);
    for (std::size_t i = 0; i < sigmas.size(); ++i)
      if (geom.dense_index[i] >= 0) sigmas[i] = dense[geom.dense_index[i]];
    const auto row = render_from_lattice(geom, sigmas, cfg, axis);
    std::copy(row.begin(), row.end(), s.row(k));
  }
  return s;
}

}  // namespace isar::fwd
