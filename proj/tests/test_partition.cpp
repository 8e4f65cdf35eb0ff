#include <random>

#include "doctest.h"
#include "pcgan/partition.hpp"
#include "test_util.hpp"

using namespace pcgan;
using pcgan::testing::posed_landmarks;
using pcgan::testing::random_binary_grid;
using pcgan::testing::random_image;

TEST_CASE("split_background with an all-zero mask is the identity") {
  std::mt19937_64 rng(1);
  const Image img = random_image(16, 12, rng);
  const Grid mask(16, 12, 0.0);
  const Image out = split_background(img, mask);
  CHECK(out.v == img.v);
}

TEST_CASE("split_background with an all-one mask blanks everything") {
  std::mt19937_64 rng(2);
  const Image img = random_image(16, 12, rng);
  const Grid mask(16, 12, 1.0);
  for (double v : split_background(img, mask).v) CHECK(v == 0.0);
}

TEST_CASE("split_foreground endpoint cases") {
  std::mt19937_64 rng(3);
  const Image img = random_image(16, 12, rng);
  CHECK(split_foreground(img, Grid(16, 12, 1.0)).v == img.v);
  for (double v : split_foreground(img, Grid(16, 12, 0.0)).v) CHECK(v == 0.0);
}

TEST_CASE("checkerboard mask matches the elementwise-product oracle") {
  std::mt19937_64 rng(4);
  const int h = 10, w = 14;
  const Image img = random_image(h, w, rng);
  Grid mask(h, w, 0.0);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) mask.at(r, c) = (r + c) % 2;
  const Image bg = split_background(img, mask);
  const Image fg = split_foreground(img, mask);
  for (int ch = 0; ch < 3; ++ch)
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        CHECK(bg.at(ch, r, c) == img.at(ch, r, c) * (1.0 - mask.at(r, c)));
        CHECK(fg.at(ch, r, c) == img.at(ch, r, c) * mask.at(r, c));
      }
}

TEST_CASE("foreground and background splits sum back to the original image") {
  std::mt19937_64 rng(5);
  const Image img = random_image(20, 16, rng);
  const Grid mask = random_binary_grid(20, 16, rng);
  const Image fg = split_foreground(img, mask);
  const Image bg = split_background(img, mask);
  for (size_t k = 0; k < img.v.size(); ++k) CHECK(fg.v[k] + bg.v[k] == img.v[k]);
}

TEST_CASE("split fill value is configurable") {
  std::mt19937_64 rng(6);
  const Image img = random_image(8, 8, rng);
  const Grid mask = random_binary_grid(8, 8, rng);
  const Image bg = split_background(img, mask, -1.0);
  for (int ch = 0; ch < 3; ++ch)
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c)
        if (mask.at(r, c) != 0.0) CHECK(bg.at(ch, r, c) == -1.0);
}

TEST_CASE("split rejects shape mismatches") {
  std::mt19937_64 rng(7);
  const Image img = random_image(8, 8, rng);
  CHECK_THROWS_AS((void)split_background(img, Grid(8, 9, 0.0)), std::invalid_argument);
}

namespace {

RegionMaskSet random_regions(int h, int w, std::mt19937_64& rng) {
  RegionMaskSet regions;
  for (int i = 0; i < kNumParts; ++i) regions.regions[i] = random_binary_grid(h, w, rng, 0.3);
  return regions;
}

void check_mask_algebra(const Grid& body, const std::array<Grid, kNumParts>& refined) {
  Grid uni(body.h, body.w, 0.0);
  for (size_t k = 0; k < body.v.size(); ++k) {
    for (int i = 0; i < kNumParts; ++i) {
      CHECK((refined[i].v[k] == 0.0 || refined[i].v[k] == 1.0));
      if (refined[i].v[k] != 0.0) {
        uni.v[k] = 1.0;
        CHECK(body.v[k] == 1.0);  // refined(i) subset of body
        if (i != kTorso) CHECK(refined[kTorso].v[k] == 0.0);  // torso disjoint
      }
    }
    CHECK(uni.v[k] == body.v[k]);  // union reproduces the body exactly
  }
}

}  // namespace

TEST_CASE("all-one body keeps regions and makes the torso their complement") {
  std::mt19937_64 rng(8);
  const int h = 12, w = 10;
  const Grid body(h, w, 1.0);
  const RegionMaskSet regions = random_regions(h, w, rng);
  const auto refined = refine_part_masks(body, regions);
  for (int i = 1; i < kNumParts; ++i) CHECK(refined[i].v == regions.regions[i].v);
  for (size_t k = 0; k < body.v.size(); ++k) {
    bool in_any = false;
    for (int i = 1; i < kNumParts; ++i) in_any = in_any || regions.regions[i].v[k] != 0.0;
    CHECK(refined[kTorso].v[k] == (in_any ? 0.0 : 1.0));
  }
}

TEST_CASE("regions disjoint from the body refine to all-zero") {
  const int h = 8, w = 8;
  Grid body(h, w, 0.0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < w; ++c) body.at(r, c) = 1.0;
  RegionMaskSet regions;
  for (int i = 0; i < kNumParts; ++i) {
    regions.regions[i] = Grid(h, w, 0.0);
    for (int r = 4; r < 8; ++r)
      for (int c = 0; c < w; ++c) regions.regions[i].at(r, c) = 1.0;
  }
  const auto refined = refine_part_masks(body, regions);
  for (int i = 1; i < kNumParts; ++i)
    for (double v : refined[i].v) CHECK(v == 0.0);
  CHECK(refined[kTorso].v == body.v);  // remainder takes the whole body
}

TEST_CASE("refined masks satisfy the partition algebra on random inputs") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    const int h = 16, w = 12;
    const Grid body = random_binary_grid(h, w, rng);
    const auto refined = refine_part_masks(body, random_regions(h, w, rng));
    check_mask_algebra(body, refined);
  }
}

TEST_CASE("refinement is idempotent") {
  std::mt19937_64 rng(10);
  const int h = 16, w = 12;
  const Grid body = random_binary_grid(h, w, rng);
  const auto refined = refine_part_masks(body, random_regions(h, w, rng));
  RegionMaskSet as_regions;
  as_regions.regions = refined;
  const auto again = refine_part_masks(body, as_regions);
  for (int i = 0; i < kNumParts; ++i) CHECK(again[i].v == refined[i].v);
}

TEST_CASE("refine_part_masks rejects shape mismatches") {
  std::mt19937_64 rng(11);
  RegionMaskSet regions = random_regions(8, 8, rng);
  CHECK_THROWS_AS((void)refine_part_masks(Grid(8, 9, 0.0), regions), std::invalid_argument);
}

TEST_CASE("mask algebra holds for geometric region masks") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const int h = 48, w = 32;
    const LandmarkSet lm = posed_landmarks(h, w, rng);
    const RegionMaskSet regions = build_region_masks(lm, body_shape_index(lm), h, w);
    const Grid body = random_binary_grid(h, w, rng, 0.6);
    check_mask_algebra(body, refine_part_masks(body, regions));
  }
}
