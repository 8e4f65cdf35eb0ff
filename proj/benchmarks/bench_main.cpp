#include <benchmark/benchmark.h>

#include <random>

#include "pcgan/geometry.hpp"
#include "pcgan/nn.hpp"
#include "pcgan/transform.hpp"
#include "pcgan/wnet.hpp"

using namespace pcgan;

namespace {

LandmarkSet sample_landmarks(int h, int w, std::mt19937_64& rng) {
  LandmarkSet lm;
  lm.image_height = h;
  lm.image_width = w;
  std::uniform_real_distribution<double> ur(0.0, h - 1.0), uc(0.0, w - 1.0);
  for (int j = 0; j < kNumLandmarks; ++j) lm.points[j] = Landmark{ur(rng), uc(rng)};
  return lm;
}

void BM_Heatmaps128x64(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const LandmarkSet lm = sample_landmarks(128, 64, rng);
  for (auto _ : state) benchmark::DoNotOptimize(heatmaps_from_landmarks(lm, 6.0));
}
BENCHMARK(BM_Heatmaps128x64);

void BM_BuildRegionMasks(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const LandmarkSet lm = sample_landmarks(128, 64, rng);
  const double d_s = 20.0;
  for (auto _ : state) benchmark::DoNotOptimize(build_region_masks(lm, d_s, 128, 64));
}
BENCHMARK(BM_BuildRegionMasks);

void BM_WarpAndMerge(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int c = 64, h = 32, w = 16, full_h = 128, full_w = 64;
  std::vector<double> feats(static_cast<size_t>(c) * h * w), out(feats.size());
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : feats) v = u(rng);
  std::array<Grid, kNumParts> masks;
  PartAffineSet affines;
  std::bernoulli_distribution coin(0.3);
  for (int i = 0; i < kNumParts; ++i) {
    masks[i] = Grid(full_h, full_w, 0.0);
    for (double& v : masks[i].v) v = coin(rng) ? 1.0 : 0.0;
    affines.transforms[i] = {1.0, 0.1, -0.1, 1.0, 3.0, -2.0};
    affines.valid[i] = true;
  }
  for (auto _ : state) {
    warp_and_merge_features(feats.data(), c, h, w, masks, affines, full_h, full_w, out.data());
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_WarpAndMerge);

void BM_Conv2dForward(benchmark::State& state) {
  std::mt19937_64 rng(4);
  Conv2d conv(64, 128, 4, 2, 1, rng);
  Tensor4 x(1, 64, 64, 32);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : x.v) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x, false));
}
BENCHMARK(BM_Conv2dForward);

void BM_GeneratorForwardMicro(benchmark::State& state) {
  std::mt19937_64 rng(5);
  GeneratorSpec spec;
  spec.depth = 6;
  spec.input_h = 64;
  spec.input_w = 32;
  spec.base_channels = 2;
  Generator gen(spec, rng);
  std::uniform_real_distribution<double> u(-1, 1);
  Tensor4 src(1, kGeneratorInputChannels, 64, 32), tgt(1, kGeneratorInputChannels, 64, 32);
  for (double& v : src.v) v = u(rng);
  for (double& v : tgt.v) v = u(rng);
  std::vector<WarpContext> warps(1);
  for (int i = 0; i < kNumParts; ++i)
    warps[0].refined_masks[i] = Grid(64, 32, i == kTorso ? 1.0 : 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(gen.forward(src, tgt, warps, false));
}
BENCHMARK(BM_GeneratorForwardMicro);

}  // namespace

BENCHMARK_MAIN();
