#include "isar/field.hpp"

#include <omp.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "isar/io.hpp"
#include "isar/rng.hpp"

namespace isar::field {

namespace {

constexpr int kLayers = 4;
constexpr std::uint64_t kHashPrimeY = 2654435761ULL;

inline std::uint32_t hash2d(std::uint64_t cx, std::uint64_t cy, std::uint32_t mask) {
  return static_cast<std::uint32_t>((cx ^ (cy * kHashPrimeY)) & mask);
}

inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double sigmoid(double z) {
  if (z > 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct CornerSet {
  std::uint32_t slot[4];
  double weight[4];
};

// Normalizes a scene position to [0,1]^2; throws outside the domain.
inline void normalize_position(const Point3& p, double extent, double& ux, double& uy) {
  ux = (p.x + extent) / (2.0 * extent);
  uy = (p.y + extent) / (2.0 * extent);
  constexpr double kSlack = 1e-9;
  if (!(ux >= -kSlack && ux <= 1.0 + kSlack && uy >= -kSlack && uy <= 1.0 + kSlack))
    throw std::domain_error("field: position outside the scene extent");
  ux = std::min(std::max(ux, 0.0), 1.0);
  uy = std::min(std::max(uy, 0.0), 1.0);
}

// Per-level bilinear corner lookup.
inline void encode_level(double ux, double uy, int resolution, std::uint32_t mask,
                         const double* table, int features_per_level,
                         double* features, CornerSet* corners) {
  const double sx = ux * resolution;
  const double sy = uy * resolution;
  int ix = static_cast<int>(sx);
  int iy = static_cast<int>(sy);
  if (ix > resolution - 1) ix = resolution - 1;
  if (iy > resolution - 1) iy = resolution - 1;
  const double fx = sx - ix;
  const double fy = sy - iy;

  const std::uint32_t s00 = hash2d(ix, iy, mask);
  const std::uint32_t s10 = hash2d(ix + 1, iy, mask);
  const std::uint32_t s01 = hash2d(ix, iy + 1, mask);
  const std::uint32_t s11 = hash2d(ix + 1, iy + 1, mask);
  const double w00 = (1.0 - fx) * (1.0 - fy);
  const double w10 = fx * (1.0 - fy);
  const double w01 = (1.0 - fx) * fy;
  const double w11 = fx * fy;

  for (int f = 0; f < features_per_level; ++f) {
    features[f] = w00 * table[s00 * features_per_level + f] +
                  w10 * table[s10 * features_per_level + f] +
                  w01 * table[s01 * features_per_level + f] +
                  w11 * table[s11 * features_per_level + f];
  }
  if (corners) {
    corners->slot[0] = s00;
    corners->slot[1] = s10;
    corners->slot[2] = s01;
    corners->slot[3] = s11;
    corners->weight[0] = w00;
    corners->weight[1] = w10;
    corners->weight[2] = w01;
    corners->weight[3] = w11;
  }
}

struct Scratch {
  std::vector<double> enc, h1, h2, h3;
};

// Full forward pass for one position. Returns sigma; fills the scratch
// activations and the optional per-level corner records.
double forward_point(const FieldParams& params, const Point3& p, Scratch& s,
                     CornerSet* corners, double* z_out) {
  const FieldConfig& cfg = params.config();
  const HashEncodingConfig& enc_cfg = cfg.encoding;
  const int F = enc_cfg.features_per_level;
  const int feat_dim = enc_cfg.feature_dim();
  const int H = cfg.hidden_width;
  const std::uint32_t mask = static_cast<std::uint32_t>(enc_cfg.table_size() - 1);

  double ux, uy;
  normalize_position(p, cfg.domain_extent, ux, uy);

  s.enc.resize(feat_dim);
  s.h1.resize(H);
  s.h2.resize(H);
  s.h3.resize(H);

  const double* values = params.values().data();
  for (int level = 0; level < enc_cfg.n_levels; ++level) {
    encode_level(ux, uy, enc_cfg.level_resolution(level), mask,
                 values + params.table_offset(level), F, s.enc.data() + level * F,
                 corners ? corners + level : nullptr);
  }

  const double* W0 = values + params.weight_offset(0);
  const double* b0 = values + params.bias_offset(0);
  for (int j = 0; j < H; ++j) {
    double acc = b0[j];
    const double* w = W0 + static_cast<std::size_t>(j) * feat_dim;
    for (int k = 0; k < feat_dim; ++k) acc += w[k] * s.enc[k];
    s.h1[j] = acc > 0.0 ? acc : 0.0;
  }
  const double* W1 = values + params.weight_offset(1);
  const double* b1 = values + params.bias_offset(1);
  for (int j = 0; j < H; ++j) {
    double acc = b1[j];
    const double* w = W1 + static_cast<std::size_t>(j) * H;
    for (int k = 0; k < H; ++k) acc += w[k] * s.h1[k];
    s.h2[j] = acc > 0.0 ? acc : 0.0;
  }
  const double* W2 = values + params.weight_offset(2);
  const double* b2 = values + params.bias_offset(2);
  for (int j = 0; j < H; ++j) {
    double acc = b2[j];
    const double* w = W2 + static_cast<std::size_t>(j) * H;
    for (int k = 0; k < H; ++k) acc += w[k] * s.h2[k];
    s.h3[j] = acc > 0.0 ? acc : 0.0;
  }
  const double* W3 = values + params.weight_offset(3);
  double z = values[params.bias_offset(3)];
  for (int k = 0; k < H; ++k) z += W3[k] * s.h3[k];

  if (z_out) *z_out = z;
  const double sigma = softplus(z);
  if (!std::isfinite(sigma))
    throw std::runtime_error("field_eval: non-finite output (diverged parameters)");
  return sigma;
}

}  // namespace

int HashEncodingConfig::level_resolution(int level) const {
  // iterated multiply keeps 1.5^k and 2^k products exact
  double r = base_resolution;
  for (int i = 0; i < level; ++i) r *= growth_factor;
  return static_cast<int>(std::floor(r));
}

FieldParams::FieldParams(const FieldConfig& cfg) : cfg_(cfg) {
  const auto& e = cfg_.encoding;
  if (e.n_levels < 1 || e.features_per_level < 1 || e.base_resolution < 1 ||
      e.growth_factor <= 1.0 || e.table_size_log2 < 1 || cfg_.hidden_width < 1 ||
      cfg_.domain_extent <= 0.0)
    throw std::invalid_argument("FieldConfig: invalid configuration");
  std::size_t n = static_cast<std::size_t>(e.n_levels) * e.table_size() * e.features_per_level;
  for (int layer = 0; layer < kLayers; ++layer)
    n += static_cast<std::size_t>(layer_out(layer)) * layer_in(layer) + layer_out(layer);
  values_.assign(n, 0.0);
}

FieldParams::FieldParams(const FieldConfig& cfg, std::uint64_t seed) : FieldParams(cfg) {
  SplitMix rng(mix_seed(seed, 0x11));
  const auto& e = cfg_.encoding;
  const std::size_t table_len =
      static_cast<std::size_t>(e.n_levels) * e.table_size() * e.features_per_level;
  for (std::size_t i = 0; i < table_len; ++i) values_[i] = rng.next_uniform(-1e-4, 1e-4);
  for (int layer = 0; layer < kLayers; ++layer) {
    const double fan_in = layer_in(layer), fan_out = layer_out(layer);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    double* w = values_.data() + weight_offset(layer);
    const std::size_t len = static_cast<std::size_t>(layer_in(layer)) * layer_out(layer);
    for (std::size_t i = 0; i < len; ++i) w[i] = rng.next_uniform(-limit, limit);
    // hidden biases stay zero
  }
  values_[bias_offset(kLayers - 1)] = cfg_.output_bias_init;
}

FieldParams FieldParams::zeros(const FieldConfig& cfg) { return FieldParams(cfg); }

int FieldParams::layer_in(int layer) const {
  return layer == 0 ? cfg_.encoding.feature_dim() : cfg_.hidden_width;
}

int FieldParams::layer_out(int layer) const {
  return layer == kLayers - 1 ? 1 : cfg_.hidden_width;
}

std::size_t FieldParams::table_offset(int level) const {
  return static_cast<std::size_t>(level) * cfg_.encoding.table_size() *
         cfg_.encoding.features_per_level;
}

std::size_t FieldParams::weight_offset(int layer) const {
  std::size_t off = table_offset(cfg_.encoding.n_levels);
  for (int l = 0; l < layer; ++l)
    off += static_cast<std::size_t>(layer_out(l)) * layer_in(l) + layer_out(l);
  return off;
}

std::size_t FieldParams::bias_offset(int layer) const {
  return weight_offset(layer) + static_cast<std::size_t>(layer_out(layer)) * layer_in(layer);
}

std::span<double> FieldParams::table(int level) {
  return {values_.data() + table_offset(level),
          static_cast<std::size_t>(cfg_.encoding.table_size()) * cfg_.encoding.features_per_level};
}
std::span<const double> FieldParams::table(int level) const {
  return {values_.data() + table_offset(level),
          static_cast<std::size_t>(cfg_.encoding.table_size()) * cfg_.encoding.features_per_level};
}
std::span<const double> FieldParams::weight(int layer) const {
  return {values_.data() + weight_offset(layer),
          static_cast<std::size_t>(layer_out(layer)) * layer_in(layer)};
}
std::span<const double> FieldParams::bias(int layer) const {
  return {values_.data() + bias_offset(layer), static_cast<std::size_t>(layer_out(layer))};
}

std::vector<double> encode(const Point3& position, const FieldParams& params) {
  const auto& enc_cfg = params.config().encoding;
  const int F = enc_cfg.features_per_level;
  std::vector<double> features(enc_cfg.feature_dim());
  double ux, uy;
  normalize_position(position, params.config().domain_extent, ux, uy);
  const std::uint32_t mask = static_cast<std::uint32_t>(enc_cfg.table_size() - 1);
  for (int level = 0; level < enc_cfg.n_levels; ++level) {
    encode_level(ux, uy, enc_cfg.level_resolution(level), mask,
                 params.values().data() + params.table_offset(level), F,
                 features.data() + level * F, nullptr);
  }
  return features;
}

double field_eval(const FieldParams& params, const Point3& position) {
  Scratch s;
  return forward_point(params, position, s, nullptr, nullptr);
}

std::pair<std::vector<double>, GradientTape> field_eval_batch(
    const FieldParams& params, std::span<const Point3> positions) {
  const FieldConfig& cfg = params.config();
  const int L = cfg.encoding.n_levels;
  const int feat_dim = cfg.encoding.feature_dim();
  const int H = cfg.hidden_width;
  const int n = static_cast<int>(positions.size());

  GradientTape tape;
  tape.params_ = &params;
  tape.n_points_ = n;
  tape.corner_slots.resize(static_cast<std::size_t>(n) * L * 4);
  tape.corner_weights.resize(static_cast<std::size_t>(n) * L * 4);
  tape.enc.resize(static_cast<std::size_t>(n) * feat_dim);
  tape.h1.resize(static_cast<std::size_t>(n) * H);
  tape.h2.resize(static_cast<std::size_t>(n) * H);
  tape.h3.resize(static_cast<std::size_t>(n) * H);
  tape.dsigma_dz.resize(n);

  std::vector<double> sigmas(n);

#pragma omp parallel if (!omp_in_parallel())
  {
    Scratch s;
    std::vector<CornerSet> corners(L);
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i) {
      double z = 0.0;
      sigmas[i] = forward_point(params, positions[i], s, corners.data(), &z);
      tape.dsigma_dz[i] = static_cast<float>(sigmoid(z));
      for (int level = 0; level < L; ++level)
        for (int c = 0; c < 4; ++c) {
          const std::size_t idx = (static_cast<std::size_t>(i) * L + level) * 4 + c;
          tape.corner_slots[idx] = corners[level].slot[c];
          tape.corner_weights[idx] = static_cast<float>(corners[level].weight[c]);
        }
      for (int k = 0; k < feat_dim; ++k)
        tape.enc[static_cast<std::size_t>(i) * feat_dim + k] = static_cast<float>(s.enc[k]);
      for (int k = 0; k < H; ++k) {
        tape.h1[static_cast<std::size_t>(i) * H + k] = static_cast<float>(s.h1[k]);
        tape.h2[static_cast<std::size_t>(i) * H + k] = static_cast<float>(s.h2[k]);
        tape.h3[static_cast<std::size_t>(i) * H + k] = static_cast<float>(s.h3[k]);
      }
    }
  }
  return {std::move(sigmas), std::move(tape)};
}

std::vector<double> field_eval_values(const FieldParams& params,
                                      std::span<const Point3> positions) {
  const int n = static_cast<int>(positions.size());
  std::vector<double> sigmas(n);
#pragma omp parallel if (!omp_in_parallel())
  {
    Scratch s;
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i)
      sigmas[i] = forward_point(params, positions[i], s, nullptr, nullptr);
  }
  return sigmas;
}

void backpropagate_into(const GradientTape& tape, std::span<const double> upstream,
                        FieldGradient& grad) {
  const FieldParams& params = *tape.params_;
  const FieldConfig& cfg = params.config();
  if (static_cast<int>(upstream.size()) != tape.n_points_)
    throw std::invalid_argument("backpropagate: upstream length != tape batch size");
  if (grad.size() != params.size())
    throw std::invalid_argument("backpropagate: gradient shape mismatch");

  const int L = cfg.encoding.n_levels;
  const int F = cfg.encoding.features_per_level;
  const int feat_dim = cfg.encoding.feature_dim();
  const int H = cfg.hidden_width;
  const double* values = params.values().data();
  const double* W0 = values + params.weight_offset(0);
  const double* W1 = values + params.weight_offset(1);
  const double* W2 = values + params.weight_offset(2);
  const double* W3 = values + params.weight_offset(3);

  double* gW0 = grad.data() + params.weight_offset(0);
  double* gb0 = grad.data() + params.bias_offset(0);
  double* gW1 = grad.data() + params.weight_offset(1);
  double* gb1 = grad.data() + params.bias_offset(1);
  double* gW2 = grad.data() + params.weight_offset(2);
  double* gb2 = grad.data() + params.bias_offset(2);
  double* gW3 = grad.data() + params.weight_offset(3);
  double* gb3 = grad.data() + params.bias_offset(3);

  std::vector<double> d3(H), d2(H), d1(H), denc(feat_dim);

  for (int i = 0; i < tape.n_points_; ++i) {
    const double u = upstream[i];
    if (u == 0.0) continue;
    const double dz = u * tape.dsigma_dz[i];
    const float* h1 = tape.h1.data() + static_cast<std::size_t>(i) * H;
    const float* h2 = tape.h2.data() + static_cast<std::size_t>(i) * H;
    const float* h3 = tape.h3.data() + static_cast<std::size_t>(i) * H;
    const float* enc = tape.enc.data() + static_cast<std::size_t>(i) * feat_dim;

    *gb3 += dz;
    for (int k = 0; k < H; ++k) {
      gW3[k] += dz * h3[k];
      d3[k] = h3[k] > 0.0f ? dz * W3[k] : 0.0;
    }
    // fused weight-gradient and transposed matvec passes, contiguous in k
    std::fill(d2.begin(), d2.end(), 0.0);
    for (int j = 0; j < H; ++j) {
      const double dj = d3[j];
      if (dj == 0.0) continue;
      gb2[j] += dj;
      double* gw = gW2 + static_cast<std::size_t>(j) * H;
      const double* w = W2 + static_cast<std::size_t>(j) * H;
      for (int k = 0; k < H; ++k) {
        gw[k] += dj * h2[k];
        d2[k] += dj * w[k];
      }
    }
    for (int k = 0; k < H; ++k)
      if (!(h2[k] > 0.0f)) d2[k] = 0.0;

    std::fill(d1.begin(), d1.end(), 0.0);
    for (int j = 0; j < H; ++j) {
      const double dj = d2[j];
      if (dj == 0.0) continue;
      gb1[j] += dj;
      double* gw = gW1 + static_cast<std::size_t>(j) * H;
      const double* w = W1 + static_cast<std::size_t>(j) * H;
      for (int k = 0; k < H; ++k) {
        gw[k] += dj * h1[k];
        d1[k] += dj * w[k];
      }
    }
    for (int k = 0; k < H; ++k)
      if (!(h1[k] > 0.0f)) d1[k] = 0.0;

    std::fill(denc.begin(), denc.end(), 0.0);
    for (int j = 0; j < H; ++j) {
      const double dj = d1[j];
      if (dj == 0.0) continue;
      gb0[j] += dj;
      double* gw = gW0 + static_cast<std::size_t>(j) * feat_dim;
      const double* w = W0 + static_cast<std::size_t>(j) * feat_dim;
      for (int k = 0; k < feat_dim; ++k) {
        gw[k] += dj * enc[k];
        denc[k] += dj * w[k];
      }
    }

    const std::uint32_t* slots = tape.corner_slots.data() + static_cast<std::size_t>(i) * L * 4;
    const float* weights = tape.corner_weights.data() + static_cast<std::size_t>(i) * L * 4;
    for (int level = 0; level < L; ++level) {
      double* gtable = grad.data() + params.table_offset(level);
      for (int c = 0; c < 4; ++c) {
        const double w = weights[level * 4 + c];
        const std::uint32_t slot = slots[level * 4 + c];
        for (int f = 0; f < F; ++f) gtable[slot * F + f] += w * denc[level * F + f];
      }
    }
  }
}

FieldGradient backpropagate(const GradientTape& tape, std::span<const double> upstream) {
  FieldGradient grad(tape.params().size(), 0.0);
  backpropagate_into(tape, upstream, grad);
  return grad;
}

void save_checkpoint(const FieldParams& params, const std::string& path) {
  const FieldConfig& cfg = params.config();
  std::string bytes;
  auto put = [&bytes](const void* p, std::size_t n) {
    bytes.append(static_cast<const char*>(p), n);
  };
  bytes.append("IFLD", 4);
  const std::uint16_t version = 1;
  put(&version, sizeof version);
  const std::int32_t ints[5] = {cfg.encoding.n_levels, cfg.encoding.base_resolution,
                                cfg.encoding.features_per_level, cfg.encoding.table_size_log2,
                                cfg.hidden_width};
  put(ints, sizeof ints);
  put(&cfg.encoding.growth_factor, sizeof(double));
  put(&cfg.domain_extent, sizeof(double));
  const std::uint64_t n = params.size();
  put(&n, sizeof n);
  std::vector<float> vals32(params.values().begin(), params.values().end());
  put(vals32.data(), vals32.size() * sizeof(float));
  io::write_file_atomic(path, bytes);
}

FieldParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "IFLD", 4) != 0)
    throw std::runtime_error("load_checkpoint: bad magic");
  std::uint16_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (version != 1) throw std::runtime_error("load_checkpoint: unsupported version");
  std::int32_t ints[5];
  in.read(reinterpret_cast<char*>(ints), sizeof ints);
  FieldConfig cfg;
  cfg.encoding.n_levels = ints[0];
  cfg.encoding.base_resolution = ints[1];
  cfg.encoding.features_per_level = ints[2];
  cfg.encoding.table_size_log2 = ints[3];
  cfg.hidden_width = ints[4];
  in.read(reinterpret_cast<char*>(&cfg.encoding.growth_factor), sizeof(double));
  in.read(reinterpret_cast<char*>(&cfg.domain_extent), sizeof(double));
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  FieldParams params = FieldParams::zeros(cfg);
  if (n != params.size()) throw std::runtime_error("load_checkpoint: parameter count mismatch");
  std::vector<float> vals32(n);
  in.read(reinterpret_cast<char*>(vals32.data()), static_cast<std::streamsize>(n * sizeof(float)));
  if (!in) throw std::runtime_error("load_checkpoint: truncated file");
  for (std::uint64_t i = 0; i < n; ++i) params.values()[i] = vals32[i];
  return params;
}

}  // namespace isar::field
