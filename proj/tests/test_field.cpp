#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "doctest.h"
#include "isar/field.hpp"
#include "isar/io.hpp"
#include "isar/rng.hpp"

using namespace isar;
using namespace isar::field;

namespace {

FieldConfig small_config() {
  FieldConfig cfg;
  cfg.encoding.n_levels = 3;
  cfg.encoding.base_resolution = 16;
  cfg.encoding.growth_factor = 2.0;
  cfg.encoding.features_per_level = 2;
  cfg.encoding.table_size_log2 = 14;
  cfg.hidden_width = 16;
  cfg.domain_extent = 0.5;
  return cfg;
}

double softplus_ref(double z) { return std::log1p(std::exp(z)); }

}  // namespace

TEST_CASE("zero tables give a zero feature vector") {
  const auto params = FieldParams::zeros(small_config());
  SplitMix rng(5);
  for (int i = 0; i < 50; ++i) {
    const Point3 p{rng.next_uniform(-0.5, 0.5), rng.next_uniform(-0.5, 0.5), 0.0};
    for (double f : encode(p, params)) CHECK(f == 0.0);
  }
}

TEST_CASE("encoding at a grid corner returns that corner's table entry") {
  auto params = FieldParams::zeros(small_config());
  // level-0 corner (3, 5) at resolution 16; frozen hash index
  const std::uint32_t slot = 8310;  // (3 ^ (5 * 2654435761)) mod 2^14
  params.table(0)[slot * 2 + 0] = 1.25;
  params.table(0)[slot * 2 + 1] = -0.5;
  const Point3 p{3.0 / 16.0 - 0.5, 5.0 / 16.0 - 0.5, 0.0};
  const auto features = encode(p, params);
  CHECK(features[0] == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(features[1] == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("frozen hash indices match the fixed constants") {
  auto params = FieldParams::zeros(small_config());
  // level 1 has resolution 32; corner (7, 11) hashes to 15004
  params.table(1)[15004 * 2 + 0] = 2.0;
  const Point3 p{7.0 / 32.0 - 0.5, 11.0 / 32.0 - 0.5, 0.0};
  const auto features = encode(p, params);
  CHECK(features[2] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("interpolation weights sum to one at any position") {
  // constant tables turn the weight sum into the feature value itself
  auto params = FieldParams::zeros(small_config());
  for (int level = 0; level < 3; ++level)
    for (auto& v : params.table(level)) v = 1.0;
  SplitMix rng(11);
  for (int i = 0; i < 200; ++i) {
    const Point3 p{rng.next_uniform(-0.5, 0.5), rng.next_uniform(-0.5, 0.5), 0.0};
    for (double f : encode(p, params)) CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("encoding is affine within a single cell") {
  FieldConfig cfg = small_config();
  FieldParams params(cfg, 77);
  // the open interval (17/64, 18/64) crosses no cell boundary on any level
  const double ua = 17.05 / 64.0, ub = 17.95 / 64.0, um = (ua + ub) / 2.0;
  const double y = 17.4 / 64.0 - 0.5;
  const auto fa = encode({ua - 0.5, y, 0.0}, params);
  const auto fb = encode({ub - 0.5, y, 0.0}, params);
  const auto fm = encode({um - 0.5, y, 0.0}, params);
  for (std::size_t i = 0; i < fa.size(); ++i)
    CHECK(fm[i] == doctest::Approx((fa[i] + fb[i]) / 2.0).epsilon(1e-9));
}

TEST_CASE("position outside the domain throws") {
  const auto params = FieldParams::zeros(small_config());
  CHECK_THROWS_AS(encode({0.51, 0.0, 0.0}, params), std::domain_error);
  CHECK_THROWS_AS(field_eval(params, {0.0, -0.51, 0.0}), std::domain_error);
}

TEST_CASE("constant network returns softplus of the output bias") {
  auto params = FieldParams::zeros(small_config());
  params.values()[params.bias_offset(3)] = 0.7;
  SplitMix rng(3);
  for (int i = 0; i < 20; ++i) {
    const Point3 p{rng.next_uniform(-0.5, 0.5), rng.next_uniform(-0.5, 0.5), 0.0};
    CHECK(field_eval(params, p) == doctest::Approx(softplus_ref(0.7)).epsilon(1e-12));
  }
}

TEST_CASE("field evaluation is deterministic and non-negative") {
  FieldParams params(small_config(), 99);
  SplitMix rng(4);
  for (int i = 0; i < 100; ++i) {
    const Point3 p{rng.next_uniform(-0.5, 0.5), rng.next_uniform(-0.5, 0.5), 0.0};
    const double a = field_eval(params, p);
    const double b = field_eval(params, p);
    CHECK(a == b);
    CHECK(a >= 0.0);
  }
}

TEST_CASE("batch of one equals single evaluation") {
  FieldParams params(small_config(), 15);
  const Point3 p{0.12, -0.33, 0.0};
  const auto [sigmas, tape] = field_eval_batch(params, std::span<const Point3>(&p, 1));
  CHECK(sigmas[0] == field_eval(params, p));
  CHECK(tape.batch_size() == 1);
}

TEST_CASE("permuting the batch permutes the outputs") {
  FieldParams params(small_config(), 16);
  SplitMix rng(8);
  std::vector<Point3> pts;
  for (int i = 0; i < 32; ++i)
    pts.push_back({rng.next_uniform(-0.5, 0.5), rng.next_uniform(-0.5, 0.5), 0.0});
  const auto fwd = field_eval_values(params, pts);
  std::vector<Point3> rev(pts.rbegin(), pts.rend());
  const auto bwd = field_eval_values(params, rev);
  for (int i = 0; i < 32; ++i) CHECK(fwd[i] == bwd[31 - i]);
}

TEST_CASE("zero upstream gives a zero gradient") {
  FieldParams params(small_config(), 21);
  std::vector<Point3> pts{{0.1, 0.1, 0.0}, {-0.2, 0.3, 0.0}};
  const auto [sigmas, tape] = field_eval_batch(params, pts);
  const std::vector<double> upstream(2, 0.0);
  const auto grad = backpropagate(tape, upstream);
  for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("one-hot upstream reproduces the single-point gradient") {
  FieldParams params(small_config(), 22);
  std::vector<Point3> pts{{0.1, 0.1, 0.0}, {-0.2, 0.3, 0.0}, {0.4, -0.1, 0.0}};
  const auto [sigmas, tape] = field_eval_batch(params, pts);
  const std::vector<double> one_hot{0.0, 1.0, 0.0};
  const auto grad = backpropagate(tape, one_hot);

  const auto [s1, tape1] = field_eval_batch(params, std::span<const Point3>(&pts[1], 1));
  const std::vector<double> one{1.0};
  const auto grad1 = backpropagate(tape1, one);
  REQUIRE(grad.size() == grad1.size());
  for (std::size_t i = 0; i < grad.size(); ++i) CHECK(grad[i] == grad1[i]);
}

TEST_CASE("tape gradient of a sum equals the sum of per-point gradients") {
  FieldParams params(small_config(), 23);
  std::vector<Point3> pts;
  SplitMix rng(17);
  for (int i = 0; i < 8; ++i)
    pts.push_back({rng.next_uniform(-0.5, 0.5), rng.next_uniform(-0.5, 0.5), 0.0});
  const auto [sigmas, tape] = field_eval_batch(params, pts);
  const std::vector<double> ones(pts.size(), 1.0);
  const auto grad_sum = backpropagate(tape, ones);

  FieldGradient acc(params.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto [s1, t1] = field_eval_batch(params, std::span<const Point3>(&pts[i], 1));
    const std::vector<double> one{1.0};
    backpropagate_into(t1, one, acc);
  }
  for (std::size_t i = 0; i < grad_sum.size(); ++i)
    CHECK(grad_sum[i] == doctest::Approx(acc[i]).epsilon(1e-12));
}

TEST_CASE("upstream length mismatch throws") {
  FieldParams params(small_config(), 24);
  std::vector<Point3> pts{{0.1, 0.1, 0.0}, {-0.2, 0.3, 0.0}};
  const auto [sigmas, tape] = field_eval_batch(params, pts);
  const std::vector<double> bad(3, 1.0);
  CHECK_THROWS_AS(backpropagate(tape, bad), std::invalid_argument);
}

TEST_CASE("reverse-mode gradient matches central finite differences") {
  FieldParams params(small_config(), 31);
  std::vector<Point3> pts;
  SplitMix rng(32);
  for (int i = 0; i < 6; ++i)
    pts.push_back({rng.next_uniform(-0.45, 0.45), rng.next_uniform(-0.45, 0.45), 0.0});

  const auto [sigmas, tape] = field_eval_batch(params, pts);
  const std::vector<double> ones(pts.size(), 1.0);
  const auto grad = backpropagate(tape, ones);

  auto loss = [&](const FieldParams& q) {
    double sum = 0.0;
    for (const auto& p : pts) sum += field_eval(q, p);
    return sum;
  };

  const double eps = 1e-4;
  SplitMix pick(33);
  int checked = 0;
  while (checked < 20) {
    const std::size_t idx = pick.next_below(params.size());
    FieldParams perturbed = params;
    perturbed.values()[idx] += eps;
    const double up = loss(perturbed);
    perturbed.values()[idx] -= 2.0 * eps;
    const double down = loss(perturbed);
    const double numeric = (up - down) / (2.0 * eps);
    const double rel = std::abs(grad[idx] - numeric) / std::max(std::abs(numeric), 1e-8);
    CHECK(rel < 1e-4);
    ++checked;
  }
}

TEST_CASE("non-finite parameters are reported") {
  auto params = FieldParams::zeros(small_config());
  params.values()[params.bias_offset(3)] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(field_eval(params, {0.0, 0.0, 0.0}), std::runtime_error);
}

TEST_CASE("checkpoint round-trip is byte-stable") {
  FieldParams params(small_config(), 55);
  const std::string path_a = "/tmp/isar_test_ckpt_a.bin";
  const std::string path_b = "/tmp/isar_test_ckpt_b.bin";
  save_checkpoint(params, path_a);
  const auto loaded = load_checkpoint(path_a);
  save_checkpoint(loaded, path_b);
  CHECK(io::file_hash(path_a) == io::file_hash(path_b));

  // loaded values are the float32 rounding of the originals
  REQUIRE(loaded.size() == params.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    CHECK(loaded.values()[i] == static_cast<double>(static_cast<float>(params.values()[i])));

  const auto& cfg = loaded.config();
  CHECK(cfg.encoding.n_levels == 3);
  CHECK(cfg.encoding.growth_factor == 2.0);
  CHECK(cfg.hidden_width == 16);
  CHECK(cfg.domain_extent == 0.5);
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
}

TEST_CASE("default configuration builds the documented parameter count") {
  FieldConfig cfg;  // 8 levels, 2^14 entries, 2 features, hidden 64
  const auto params = FieldParams::zeros(cfg);
  const std::size_t tables = 8ull * 16384 * 2;
  const std::size_t mlp = (16ull * 64 + 64) + (64ull * 64 + 64) + (64ull * 64 + 64) + (64 + 1);
  CHECK(params.size() == tables + mlp);
}
