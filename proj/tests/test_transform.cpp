#include <cmath>
#include <random>

#include "doctest.h"
#include "pcgan/transform.hpp"
#include "test_util.hpp"

using namespace pcgan;
using pcgan::testing::posed_landmarks;
using pcgan::testing::random_binary_grid;

namespace {

std::vector<std::pair<Landmark, Landmark>> rect_correspondence(const Affine2& map) {
  const std::vector<Landmark> corners = {{2, 3}, {2, 13}, {10, 13}, {10, 3}};
  std::vector<std::pair<Landmark, Landmark>> corr;
  for (const Landmark& p : corners) corr.emplace_back(p, map.apply(p));
  return corr;
}

double residual(const Affine2& fit, const std::vector<std::pair<Landmark, Landmark>>& corr) {
  double acc = 0;
  for (const auto& [src, tgt] : corr) {
    const Landmark q = fit.apply(src);
    acc += (q.row - tgt.row) * (q.row - tgt.row) + (q.col - tgt.col) * (q.col - tgt.col);
  }
  return acc;
}

}  // namespace

TEST_CASE("identical source and target rectangles fit the identity") {
  const auto fit = fit_affine_least_squares(rect_correspondence(Affine2{}));
  REQUIRE(fit.has_value());
  CHECK(fit->a00 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit->a01 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(fit->a10 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(fit->a11 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit->t0 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(fit->t1 == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("pure translation fits [[1,0,5],[0,1,0]]") {
  Affine2 shift;
  shift.t0 = 5.0;
  const auto fit = fit_affine_least_squares(rect_correspondence(shift));
  REQUIRE(fit.has_value());
  CHECK(fit->a00 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit->a11 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit->t0 == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(fit->t1 == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("90-degree rotation about the rectangle center fits the rotation matrix") {
  const Landmark center{6, 8};
  Affine2 rot;  // (r,c) -> center + R90 * (p - center), R90 = [[0,-1],[1,0]]
  rot.a00 = 0;
  rot.a01 = -1;
  rot.a10 = 1;
  rot.a11 = 0;
  rot.t0 = center.row + center.col;
  rot.t1 = center.col - center.row;
  const auto fit = fit_affine_least_squares(rect_correspondence(rot));
  REQUIRE(fit.has_value());
  CHECK(fit->a00 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(fit->a01 == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(fit->a10 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit->a11 == doctest::Approx(0.0).epsilon(1e-9));
  const Landmark q = fit->apply(center);
  CHECK(q.row == doctest::Approx(center.row).epsilon(1e-9));
  CHECK(q.col == doctest::Approx(center.col).epsilon(1e-9));
}

TEST_CASE("collinear correspondences are rank-deficient") {
  std::vector<std::pair<Landmark, Landmark>> corr;
  for (int i = 0; i < 5; ++i) corr.emplace_back(Landmark{1.0 * i, 2.0 * i}, Landmark{1.0 * i, 2.0 * i});
  CHECK_FALSE(fit_affine_least_squares(corr).has_value());
  CHECK_FALSE(fit_affine_least_squares({{Landmark{0, 0}, Landmark{0, 0}}}).has_value());
}

TEST_CASE("exact affine correspondences are recovered within 1e-6") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Affine2 truth;
    truth.a00 = 1.0 + 0.5 * u(rng);
    truth.a01 = 0.5 * u(rng);
    truth.a10 = 0.5 * u(rng);
    truth.a11 = 1.0 + 0.5 * u(rng);
    truth.t0 = 20 * u(rng);
    truth.t1 = 20 * u(rng);
    const auto corr = rect_correspondence(truth);
    const auto fit = fit_affine_least_squares(corr);
    REQUIRE(fit.has_value());
    CHECK(std::sqrt(residual(*fit, corr)) <= 1e-6);
  }
}

TEST_CASE("least-squares fit beats parameter perturbations on noisy correspondences") {
  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> noise(-0.5, 0.5), pert(-1e-3, 1e-3);
  for (int trial = 0; trial < 20; ++trial) {
    auto corr = rect_correspondence(Affine2{});
    for (auto& [src, tgt] : corr) {
      tgt.row += noise(rng);
      tgt.col += noise(rng);
    }
    const auto fit = fit_affine_least_squares(corr);
    REQUIRE(fit.has_value());
    const double best = residual(*fit, corr);
    for (int k = 0; k < 60; ++k) {
      Affine2 tweaked = *fit;
      tweaked.a00 += pert(rng);
      tweaked.a01 += pert(rng);
      tweaked.a10 += pert(rng);
      tweaked.a11 += pert(rng);
      tweaked.t0 += pert(rng);
      tweaked.t1 += pert(rng);
      CHECK(residual(tweaked, corr) >= best - 1e-12);
    }
  }
}

TEST_CASE("fit_part_affines: identical landmark sets give identity transforms") {
  std::mt19937_64 rng(19);
  const LandmarkSet lm = posed_landmarks(96, 48, rng);
  const PartAffineSet set = fit_part_affines(lm, lm, body_shape_index(lm));
  for (int i = 0; i < kNumParts; ++i) {
    REQUIRE(set.valid[i]);
    CHECK(set.transforms[i].a00 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(set.transforms[i].a11 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(set.transforms[i].t0 == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(set.transforms[i].t1 == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_CASE("fit_part_affines: missing part landmarks yield invalid identity entries") {
  std::mt19937_64 rng(20);
  LandmarkSet src = posed_landmarks(96, 48, rng);
  const LandmarkSet tgt = posed_landmarks(96, 48, rng);
  const double d_s = body_shape_index(src);
  src.points[kRWrist].reset();
  const PartAffineSet set = fit_part_affines(src, tgt, d_s);
  CHECK_FALSE(set.valid[kRLowerArm]);
  CHECK(set.transforms[kRLowerArm].is_identity());
  CHECK(set.valid[kTorso]);
}

TEST_CASE("max-pool downscale keeps any set pixel in the window") {
  Grid mask(4, 4, 0.0);
  mask.at(0, 1) = 1.0;
  mask.at(3, 3) = 1.0;
  const Grid down = downscale_mask(mask, 2, 2);
  CHECK(down.at(0, 0) == 1.0);
  CHECK(down.at(0, 1) == 0.0);
  CHECK(down.at(1, 0) == 0.0);
  CHECK(down.at(1, 1) == 1.0);
  CHECK_THROWS_AS((void)downscale_mask(mask, 3, 2), std::invalid_argument);
}

namespace {

std::array<Grid, kNumParts> partition_masks(int full_h, int full_w) {
  // Ten vertical stripes covering the frame.
  std::array<Grid, kNumParts> masks;
  for (int i = 0; i < kNumParts; ++i) masks[i] = Grid(full_h, full_w, 0.0);
  for (int r = 0; r < full_h; ++r)
    for (int c = 0; c < full_w; ++c) masks[(c * kNumParts) / full_w].at(r, c) = 1.0;
  return masks;
}

}  // namespace

TEST_CASE("identity affines with partitioning masks reproduce the features") {
  std::mt19937_64 rng(21);
  const int c = 3, h = 8, w = 10, full_h = 32, full_w = 40;
  std::vector<Grid> features;
  for (int ch = 0; ch < c; ++ch) {
    Grid g(h, w);
    std::uniform_real_distribution<double> u(-1, 1);
    for (double& v : g.v) v = u(rng);
    features.push_back(g);
  }
  PartAffineSet affines;  // all identity
  const auto out = warp_and_merge_features(features, partition_masks(full_h, full_w), affines,
                                           full_h, full_w);
  for (int ch = 0; ch < c; ++ch) CHECK(out[ch].v == features[ch].v);
}

TEST_CASE("single-part translation shifts features by one cell") {
  const int h = 4, w = 4, full_h = 8, full_w = 8;
  std::vector<Grid> features(1, Grid(h, w, 0.0));
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) features[0].at(r, c) = 10.0 * r + c;
  std::array<Grid, kNumParts> masks;
  for (int i = 0; i < kNumParts; ++i) masks[i] = Grid(full_h, full_w, 0.0);
  masks[0] = Grid(full_h, full_w, 1.0);
  PartAffineSet affines;
  affines.transforms[0].t0 = 2.0;  // one cell at feature scale 2
  affines.valid[0] = true;
  const auto out = warp_and_merge_features(features, masks, affines, full_h, full_w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      CHECK(out[0].at(r, c) == (r == 0 ? 0.0 : features[0].at(r - 1, c)));
}

TEST_CASE("empty masks produce all-zero output") {
  std::vector<Grid> features(2, Grid(4, 4, 1.0));
  std::array<Grid, kNumParts> masks;
  for (int i = 0; i < kNumParts; ++i) masks[i] = Grid(8, 8, 0.0);
  PartAffineSet affines;
  const auto out = warp_and_merge_features(features, masks, affines, 8, 8);
  for (const Grid& g : out)
    for (double v : g.v) CHECK(v == 0.0);
}

TEST_CASE("warp-and-merge is linear in the features") {
  std::mt19937_64 rng(22);
  const int c = 2, h = 8, w = 4, full_h = 32, full_w = 16;
  std::array<Grid, kNumParts> masks;
  PartAffineSet affines;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < kNumParts; ++i) {
    masks[i] = random_binary_grid(full_h, full_w, rng, 0.3);
    affines.transforms[i].t0 = std::round(4 * u(rng));
    affines.transforms[i].t1 = std::round(4 * u(rng));
    affines.valid[i] = true;
  }
  const auto rand_feats = [&] {
    std::vector<Grid> f(c, Grid(h, w));
    for (Grid& g : f)
      for (double& v : g.v) v = u(rng);
    return f;
  };
  const auto f1 = rand_feats(), f2 = rand_feats();
  const double a = 0.75, b = -1.5;
  std::vector<Grid> combo(c, Grid(h, w));
  for (int ch = 0; ch < c; ++ch)
    for (size_t k = 0; k < combo[ch].v.size(); ++k)
      combo[ch].v[k] = a * f1[ch].v[k] + b * f2[ch].v[k];
  const auto w1 = warp_and_merge_features(f1, masks, affines, full_h, full_w);
  const auto w2 = warp_and_merge_features(f2, masks, affines, full_h, full_w);
  const auto wc = warp_and_merge_features(combo, masks, affines, full_h, full_w);
  for (int ch = 0; ch < c; ++ch)
    for (size_t k = 0; k < wc[ch].v.size(); ++k)
      CHECK(wc[ch].v[k] == doctest::Approx(a * w1[ch].v[k] + b * w2[ch].v[k]).epsilon(1e-12));
}

TEST_CASE("warp backward is the adjoint of the forward warp") {
  std::mt19937_64 rng(23);
  const int c = 3, h = 8, w = 4, full_h = 16, full_w = 8;
  std::array<Grid, kNumParts> masks;
  PartAffineSet affines;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < kNumParts; ++i) {
    masks[i] = random_binary_grid(full_h, full_w, rng, 0.4);
    affines.transforms[i].a00 = 1.0 + 0.2 * u(rng);
    affines.transforms[i].a11 = 1.0 + 0.2 * u(rng);
    affines.transforms[i].t0 = 3 * u(rng);
    affines.transforms[i].t1 = 3 * u(rng);
    affines.valid[i] = true;
  }
  const size_t total = static_cast<size_t>(c) * h * w;
  std::vector<double> x(total), y(total), wx(total), wty(total, 0.0);
  for (double& v : x) v = u(rng);
  for (double& v : y) v = u(rng);
  warp_and_merge_features(x.data(), c, h, w, masks, affines, full_h, full_w, wx.data());
  warp_and_merge_backward(y.data(), c, h, w, masks, affines, full_h, full_w, wty.data());
  double lhs = 0, rhs = 0;
  for (size_t k = 0; k < total; ++k) {
    lhs += wx[k] * y[k];
    rhs += x[k] * wty[k];
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("non-integer downscale ratios are rejected") {
  std::vector<Grid> features(1, Grid(3, 4, 0.0));
  std::array<Grid, kNumParts> masks;
  for (int i = 0; i < kNumParts; ++i) masks[i] = Grid(8, 8, 0.0);
  PartAffineSet affines;
  CHECK_THROWS_AS((void)warp_and_merge_features(features, masks, affines, 8, 8),
                  std::invalid_argument);
}
