#include <cmath>
#include <random>

#include "doctest.h"
#include "pcgan/geometry.hpp"
#include "test_util.hpp"

using namespace pcgan;
using pcgan::testing::full_landmarks;
using pcgan::testing::posed_landmarks;

namespace {

LandmarkSet single_landmark(int j, Landmark p, int h, int w) {
  LandmarkSet lm;
  lm.image_height = h;
  lm.image_width = w;
  lm.points[j] = p;
  return lm;
}

}  // namespace

TEST_CASE("heat map peaks at the landmark pixel with value 1") {
  const auto lm = single_landmark(kNose, {10, 10}, 32, 64);
  const HeatMapStack hm = heatmaps_from_landmarks(lm, 6.0);
  CHECK(hm.channels[kNose].at(10, 10) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("heat map falloff is exp(-distance / sigma^2)") {
  const auto lm = single_landmark(kNose, {10, 10}, 32, 64);
  const HeatMapStack hm = heatmaps_from_landmarks(lm, 6.0);
  // distance 36 at (10, 46): exp(-36/36)
  CHECK(hm.channels[kNose].at(10, 46) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("missing landmark gives an all-zero channel") {
  const auto lm = single_landmark(kNose, {10, 10}, 32, 64);
  const HeatMapStack hm = heatmaps_from_landmarks(lm, 6.0);
  for (double v : hm.channels[kNeck].v) CHECK(v == 0.0);
}

TEST_CASE("non-positive sigma is rejected") {
  const auto lm = single_landmark(kNose, {10, 10}, 32, 64);
  CHECK_THROWS_AS((void)heatmaps_from_landmarks(lm, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)heatmaps_from_landmarks(lm, -1.0), std::invalid_argument);
}

TEST_CASE("squared-distance variant is the Gaussian form") {
  const auto lm = single_landmark(kNose, {10, 10}, 32, 64);
  const HeatMapStack hm = heatmaps_from_landmarks(lm, 6.0, true);
  CHECK(hm.channels[kNose].at(10, 16) == doctest::Approx(std::exp(-36.0 / 36.0)).epsilon(1e-12));
  CHECK(hm.channels[kNose].at(10, 46) == doctest::Approx(std::exp(-1296.0 / 36.0)).epsilon(1e-12));
}

TEST_CASE("heat map maximum is at the landmark and values decrease with distance") {
  std::mt19937_64 rng(11);
  const LandmarkSet lm = full_landmarks(24, 16, rng);
  const HeatMapStack hm = heatmaps_from_landmarks(lm, 4.0);
  for (int j = 0; j < kNumLandmarks; ++j) {
    const Landmark p = lm.at(j);
    double best = -1;
    int br = -1, bc = -1;
    for (int r = 0; r < 24; ++r)
      for (int c = 0; c < 16; ++c)
        if (hm.channels[j].at(r, c) > best) {
          best = hm.channels[j].at(r, c);
          br = r;
          bc = c;
        }
    CHECK(std::abs(br - p.row) <= 1.0);
    CHECK(std::abs(bc - p.col) <= 1.0);
    // Strictly decreasing along a ray away from the landmark.
    const int r0 = static_cast<int>(std::lround(p.row));
    double prev = 2.0;
    for (int c = static_cast<int>(std::lround(p.col)); c < 16; ++c) {
      const double v = hm.channels[j].at(std::clamp(r0, 0, 23), c);
      CHECK(v < prev + 1e-15);
      prev = v;
    }
  }
}

TEST_CASE("integer translation of landmarks translates heat maps and region masks") {
  std::mt19937_64 rng(5);
  const int h = 48, w = 32, dr = 3, dc = -2;
  LandmarkSet lm = posed_landmarks(h, w, rng);
  LandmarkSet shifted = lm;
  for (auto& p : shifted.points)
    if (p) *p = Landmark{p->row + dr, p->col + dc};

  const HeatMapStack a = heatmaps_from_landmarks(lm, 6.0);
  const HeatMapStack b = heatmaps_from_landmarks(shifted, 6.0);
  const double d_s = body_shape_index(lm);
  const RegionMaskSet ra = build_region_masks(lm, d_s, h, w);
  const RegionMaskSet rb = build_region_masks(shifted, d_s, h, w);

  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const int r2 = r + dr, c2 = c + dc;
      if (r2 < 0 || r2 >= h || c2 < 0 || c2 >= w) continue;
      for (int j = 0; j < kNumLandmarks; ++j)
        CHECK(a.channels[j].at(r, c) == doctest::Approx(b.channels[j].at(r2, c2)).epsilon(1e-12));
      for (int i = 0; i < kNumParts; ++i) CHECK(ra.regions[i].at(r, c) == rb.regions[i].at(r2, c2));
    }
}

TEST_CASE("body shape index: symmetric vertical torso") {
  LandmarkSet lm;
  lm.image_height = 64;
  lm.image_width = 64;
  lm.points[kRShoulder] = Landmark{10, 20};
  lm.points[kLShoulder] = Landmark{10, 40};
  lm.points[kRHip] = Landmark{30, 20};
  lm.points[kLHip] = Landmark{30, 40};
  CHECK(body_shape_index(lm) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("body shape index: hand-evaluated asymmetric torso") {
  LandmarkSet lm;
  lm.image_height = 64;
  lm.image_width = 64;
  lm.points[kRShoulder] = Landmark{10, 20};
  lm.points[kRHip] = Landmark{40, 20};
  lm.points[kLShoulder] = Landmark{10, 40};
  lm.points[kLHip] = Landmark{42, 44};
  const double expected = 0.5 * (30.0 + std::sqrt(32.0 * 32.0 + 4.0 * 4.0));
  CHECK(body_shape_index(lm) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(31.1245).epsilon(1e-4));
}

TEST_CASE("body shape index requires all four torso landmarks") {
  std::mt19937_64 rng(3);
  LandmarkSet lm = full_landmarks(64, 64, rng);
  lm.points[kRHip].reset();
  CHECK_THROWS_AS((void)body_shape_index(lm), MissingTorsoError);
}

TEST_CASE("scaling landmarks about a fixed point scales the body shape index") {
  std::mt19937_64 rng(9);
  const LandmarkSet lm = full_landmarks(100, 100, rng);
  const double base = body_shape_index(lm);
  for (const double s : {0.5, 2.0, 3.25}) {
    LandmarkSet scaled = lm;
    scaled.image_height = 1000;
    scaled.image_width = 1000;
    for (auto& p : scaled.points)
      if (p) *p = Landmark{40.0 + s * (p->row - 40.0), 40.0 + s * (p->col - 40.0)};
    CHECK(body_shape_index(scaled) == doctest::Approx(s * base).epsilon(1e-12));
  }
}

TEST_CASE("head square has side 0.8 d_s and limb rectangles width 0.3 d_s") {
  LandmarkSet lm;
  lm.image_height = 64;
  lm.image_width = 64;
  lm.points[kNose] = Landmark{20, 32};
  lm.points[kLElbow] = Landmark{10, 10};
  lm.points[kLWrist] = Landmark{10, 30};
  const auto polys = region_polygons(lm, 20.0);

  REQUIRE(polys[kHead].has_value());
  const auto& hp = polys[kHead]->pts;
  CHECK(hp.size() == 4);
  CHECK(hp[0].row == doctest::Approx(20 - 8.0));  // side 16 = 0.8 * 20
  CHECK(hp[2].row == doctest::Approx(20 + 8.0));
  CHECK(hp[0].col == doctest::Approx(32 - 8.0));
  CHECK(hp[1].col == doctest::Approx(32 + 8.0));

  REQUIRE(polys[kLLowerArm].has_value());
  const auto& ap = polys[kLLowerArm]->pts;
  CHECK(std::abs(ap[0].row - ap[3].row) == doctest::Approx(6.0));  // width 6 = 0.3 * 20
}

TEST_CASE("horizontal lower-arm rectangle rasterizes pixel-exactly") {
  LandmarkSet lm;
  lm.image_height = 64;
  lm.image_width = 64;
  lm.points[kLElbow] = Landmark{10, 10};
  lm.points[kLWrist] = Landmark{10, 30};
  const RegionMaskSet masks = build_region_masks(lm, 20.0, 64, 64);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) {
      // 20x6 rectangle on rows [7,13], cols [10,30]; boundary pixels inside.
      const bool expected = (r >= 7 && r <= 13 && c >= 10 && c <= 30);
      CHECK(masks.regions[kLLowerArm].at(r, c) == (expected ? 1.0 : 0.0));
    }
}

TEST_CASE("regions with a missing defining landmark are all-zero") {
  std::mt19937_64 rng(21);
  LandmarkSet lm = posed_landmarks(96, 48, rng);
  lm.points[kLElbow].reset();
  const RegionMaskSet masks = build_region_masks(lm, body_shape_index(lm), 96, 48);
  for (double v : masks.regions[kLUpperArm].v) CHECK(v == 0.0);
  for (double v : masks.regions[kLLowerArm].v) CHECK(v == 0.0);
  // Parts not touching the left elbow are unaffected.
  double head_sum = 0;
  for (double v : masks.regions[kHead].v) head_sum += v;
  CHECK(head_sum > 0.0);
}

TEST_CASE("head needs at least one face landmark") {
  std::mt19937_64 rng(22);
  LandmarkSet lm = posed_landmarks(96, 48, rng);
  for (int j : {kNose, kREye, kLEye, kREar, kLEar}) lm.points[j].reset();
  const auto polys = region_polygons(lm, 10.0);
  CHECK_FALSE(polys[kHead].has_value());
}

TEST_CASE("non-positive d_s is rejected") {
  std::mt19937_64 rng(23);
  const LandmarkSet lm = full_landmarks(32, 32, rng);
  CHECK_THROWS_AS((void)build_region_masks(lm, 0.0, 32, 32), std::invalid_argument);
}

TEST_CASE("mask rasterization matches a brute-force point-in-polygon oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int h = 48, w = 40;
    const LandmarkSet lm = posed_landmarks(h, w, rng);
    const double d_s = body_shape_index(lm);
    const RegionMaskSet masks = build_region_masks(lm, d_s, h, w);
    const auto polys = region_polygons(lm, d_s);
    for (int i = 0; i < kNumParts; ++i)
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
          const bool inside = polys[i] && point_in_polygon(*polys[i], r, c);
          CHECK(masks.regions[i].at(r, c) == (inside ? 1.0 : 0.0));
        }
  }
}

TEST_CASE("point_in_polygon counts the closed boundary as inside") {
  Polygon square;
  square.pts = {{0, 0}, {0, 10}, {10, 10}, {10, 0}};
  CHECK(point_in_polygon(square, 5, 5));
  CHECK(point_in_polygon(square, 0, 5));    // edge
  CHECK(point_in_polygon(square, 10, 10));  // corner
  CHECK_FALSE(point_in_polygon(square, 10.001, 5));
  CHECK_FALSE(point_in_polygon(square, -1, 5));
}

TEST_CASE("landmark validation rejects out-of-frame points") {
  LandmarkSet lm;
  lm.image_height = 10;
  lm.image_width = 10;
  lm.points[kNose] = Landmark{9.5, 0};
  CHECK_NOTHROW(lm.validate());
  lm.points[kNose] = Landmark{10, 0};
  CHECK_THROWS_AS(lm.validate(), std::invalid_argument);
}
