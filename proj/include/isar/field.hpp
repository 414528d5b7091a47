#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isar/vec3.hpp"

namespace isar::field {

// Multi-resolution hash grid over the scene plane, Instant-NGP style.
// Corner coordinates hash as (x * 1) XOR (y * 2654435761) mod table_size.
struct HashEncodingConfig {
  int n_levels = 8;
  int base_resolution = 16;    // cells per axis at level 0
  double growth_factor = 1.5;  // per-level resolution growth
  int features_per_level = 2;
  int table_size_log2 = 14;

  int table_size() const { return 1 << table_size_log2; }
  int feature_dim() const { return n_levels * features_per_level; }
  int level_resolution(int level) const;
};

struct FieldConfig {
  HashEncodingConfig encoding;
  int hidden_width = 64;
  // Scene square half-width; positions are normalized to [0,1]^2 over
  // [-domain_extent, domain_extent]^2 before encoding.
  double domain_extent = 0.5;
  // Initial output-layer bias. Negative values start the scene dark
  // (softplus(-6) ~ 2.5e-3), so reflectivity grows only where the data
  // demands it instead of having to drain everywhere through the noise.
  double output_bias_init = -6.0;
};

// Trainable state: hash tables plus four fully connected layers, stored as
// one flat vector (tables level by level, then W/b per layer). Gradients use
// the identical layout.
class FieldParams {
 public:
  FieldParams(const FieldConfig& cfg, std::uint64_t seed);
  static FieldParams zeros(const FieldConfig& cfg);

  const FieldConfig& config() const { return cfg_; }
  std::size_t size() const { return values_.size(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  std::size_t table_offset(int level) const;
  std::size_t weight_offset(int layer) const;  // layers 0..3
  std::size_t bias_offset(int layer) const;
  int layer_in(int layer) const;
  int layer_out(int layer) const;

  std::span<double> table(int level);
  std::span<const double> table(int level) const;
  std::span<const double> weight(int layer) const;
  std::span<const double> bias(int layer) const;

 private:
  explicit FieldParams(const FieldConfig& cfg);
  FieldConfig cfg_;
  std::vector<double> values_;
};

using FieldGradient = std::vector<double>;

// Bilinearly interpolated hash features, all levels concatenated.
std::vector<double> encode(const Point3& position, const FieldParams& params);

// Scattering amplitude at a scene position (>= 0 by the softplus output).
double field_eval(const FieldParams& params, const Point3& position);

// Everything the backward pass needs about one forward batch. Single use;
// invalid once the parameters it references are updated.
class GradientTape {
 public:
  int batch_size() const { return n_points_; }
  const FieldParams& params() const { return *params_; }

 private:
  friend std::pair<std::vector<double>, GradientTape> field_eval_batch(
      const FieldParams&, std::span<const Point3>);
  friend void backpropagate_into(const GradientTape&, std::span<const double>,
                                 FieldGradient&);
  const FieldParams* params_ = nullptr;
  int n_points_ = 0;
  std::vector<std::uint32_t> corner_slots;  // n_points * n_levels * 4
  std::vector<float> corner_weights;        // n_points * n_levels * 4
  std::vector<float> enc;                   // n_points * feature_dim
  std::vector<float> h1, h2, h3;            // n_points * hidden
  std::vector<float> dsigma_dz;             // n_points
};

std::pair<std::vector<double>, GradientTape> field_eval_batch(
    const FieldParams& params, std::span<const Point3> positions);

// Forward values only; no tape.
std::vector<double> field_eval_values(const FieldParams& params,
                                      std::span<const Point3> positions);

// Exact reverse-mode gradient of the recorded batch contracted with the
// upstream d(loss)/d(sigma) sensitivities.
FieldGradient backpropagate(const GradientTape& tape, std::span<const double> upstream);
void backpropagate_into(const GradientTape& tape, std::span<const double> upstream,
                        FieldGradient& grad);

// Checkpoint: "IFLD" magic, version, config block, little-endian 32-bit
// float parameters in declaration order.
void save_checkpoint(const FieldParams& params, const std::string& path);
FieldParams load_checkpoint(const std::string& path);

}  // namespace isar::field
