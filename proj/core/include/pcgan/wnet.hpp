#pragma once

#include <array>
#include <memory>
#include <random>
#include <vector>

#include "pcgan/nn.hpp"
#include "pcgan/transform.hpp"

namespace pcgan {

inline constexpr int kImageChannels = 3;
inline constexpr int kGeneratorInputChannels = kImageChannels + kNumLandmarks;  // 21
inline constexpr int kD1InputChannels = 2 * kGeneratorInputChannels;            // 42

/// Block plan of the generator. base_channels=64 reproduces the full
/// c3s1-64,d128,d256,d512,... listing; smaller bases give micro models with
/// the same topology.
struct GeneratorSpec {
  int depth = 6;  // encoder blocks: 6 (128x64) or 7 (256x256)
  int input_h = 128;
  int input_w = 64;
  int base_channels = 64;
  int skip_depth = 4;
  double dropout_rate = 0.5;

  std::vector<int> encoder_channels() const;
  std::vector<int> decoder_channels() const;  // u-block outputs; final conv emits 3
  void validate() const;
};

struct DiscriminatorSpec {
  int in_channels = kD1InputChannels;
  int base_channels = 64;
};

/// Per-sample geometry driving the warped skip connections.
struct WarpContext {
  std::array<Grid, kNumParts> refined_masks;  // full resolution, source person
  PartAffineSet affines;                      // source -> target, full resolution
};

/// One encoder branch; keeps every block output for skip connections.
class Encoder {
 public:
  Encoder(const GeneratorSpec& spec, std::mt19937_64& init_rng);
  std::vector<Tensor4> forward_all(const Tensor4& x, bool training);
  /// grads[i] is the gradient w.r.t. block i's output (empty tensor = zero).
  Tensor4 backward_all(std::vector<Tensor4> grads);
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out);

 private:
  std::vector<Sequential> blocks_;
};

/// Two-encoder/one-decoder generator. E1 skip features pass through the
/// per-part affine warp; E2 skip features are concatenated unmodified.
class Generator {
 public:
  Generator(const GeneratorSpec& spec, std::mt19937_64& init_rng);

  Tensor4 forward(const Tensor4& src_in, const Tensor4& tgt_in,
                  const std::vector<WarpContext>& warps, bool training);
  /// Backpropagates grad w.r.t. the last forward output; accumulates
  /// parameter gradients.
  void backward(const Tensor4& grad_out);

  std::vector<ParamRef> params();
  const GeneratorSpec& spec() const { return spec_; }
  std::mt19937_64& dropout_rng() { return dropout_rng_; }
  void seed_dropout(uint64_t seed) { dropout_rng_.seed(seed); }

 private:
  GeneratorSpec spec_;
  std::mt19937_64 dropout_rng_{0x9e3779b97f4a7c15ull};
  std::unique_ptr<Encoder> e1_, e2_;
  std::vector<Sequential> decoder_;
  std::vector<bool> block_has_skip_;   // per decoder block
  std::vector<int> skip_encoder_idx_;  // encoder block feeding each decoder block

  // forward caches
  std::vector<Tensor4> e1_feats_, e2_feats_;
  std::vector<Tensor4> warped_;  // warped E1 skip features per decoder block
  std::vector<int> concat_dec_channels_;
  std::vector<WarpContext> warps_cache_;
};

/// PatchGAN-style stack c4s2-64,d128,d256,d512,d1 with sigmoid output.
class Discriminator {
 public:
  Discriminator(const DiscriminatorSpec& spec, std::mt19937_64& init_rng);
  Tensor4 forward(const Tensor4& x, bool training);
  Tensor4 backward(const Tensor4& grad_out);
  std::vector<ParamRef> params();
  const DiscriminatorSpec& spec() const { return spec_; }

 private:
  DiscriminatorSpec spec_;
  Sequential net_;
};

}  // namespace pcgan
