#include "pcgan/wnet.hpp"

namespace pcgan {

namespace {

void accumulate(Tensor4& dst, const Tensor4& src) {
  if (dst.size() == 0) {
    dst = src;
    return;
  }
  require(dst.same_shape(src), "gradient accumulation shape mismatch");
  for (size_t k = 0; k < dst.v.size(); ++k) dst.v[k] += src.v[k];
}

}  // namespace

std::vector<int> GeneratorSpec::encoder_channels() const {
  std::vector<int> ch;
  for (int i = 0; i < depth; ++i) ch.push_back(base_channels * std::min(8, 1 << i));
  return ch;
}

std::vector<int> GeneratorSpec::decoder_channels() const {
  // 6-block: u512,u512,u512,u256,u128; 7-block prepends one u512.
  std::vector<int> ch(depth - 3, base_channels * 8);
  ch.push_back(base_channels * 4);
  ch.push_back(base_channels * 2);
  return ch;
}

void GeneratorSpec::validate() const {
  require(depth == 6 || depth == 7, "GeneratorSpec: depth must be 6 or 7");
  require(base_channels >= 1, "GeneratorSpec: base_channels must be positive");
  const int down = 1 << (depth - 1);
  require(input_h % down == 0 && input_w % down == 0,
          "GeneratorSpec: input size must be divisible by the encoder downscale");
  require(skip_depth >= 1 && skip_depth < depth, "GeneratorSpec: bad skip_depth");
}

Encoder::Encoder(const GeneratorSpec& spec, std::mt19937_64& init_rng) {
  const auto ch = spec.encoder_channels();
  for (int i = 0; i < spec.depth; ++i) {
    Sequential block;
    const int in_c = i == 0 ? kGeneratorInputChannels : ch[i - 1];
    if (i == 0) {
      block.add(std::make_unique<Conv2d>(in_c, ch[i], 3, 1, 1, init_rng));
    } else {
      block.add(std::make_unique<Conv2d>(in_c, ch[i], 4, 2, 1, init_rng));
      // InstanceNorm removed from the last encoder block.
      if (i != spec.depth - 1) block.add(std::make_unique<InstanceNorm>());
    }
    block.add(std::make_unique<ReLU>());
    blocks_.push_back(std::move(block));
  }
}

std::vector<Tensor4> Encoder::forward_all(const Tensor4& x, bool training) {
  std::vector<Tensor4> feats;
  Tensor4 cur = x;
  for (auto& block : blocks_) {
    cur = block.forward(cur, training);
    feats.push_back(cur);
  }
  return feats;
}

Tensor4 Encoder::backward_all(std::vector<Tensor4> grads) {
  const int depth = static_cast<int>(blocks_.size());
  require(grads[depth - 1].size() > 0, "Encoder::backward_all: missing bottleneck grad");
  Tensor4 g = std::move(grads[depth - 1]);
  for (int i = depth - 1; i >= 0; --i) {
    Tensor4 gi = blocks_[i].backward(g);
    if (i == 0) return gi;
    g = std::move(gi);
    if (grads[i - 1].size() > 0) accumulate(g, grads[i - 1]);
  }
  return g;
}

void Encoder::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  for (size_t i = 0; i < blocks_.size(); ++i)
    blocks_[i].collect_params(prefix + "/block" + std::to_string(i), out);
}

Generator::Generator(const GeneratorSpec& spec, std::mt19937_64& init_rng) : spec_(spec) {
  spec_.validate();
  e1_ = std::make_unique<Encoder>(spec_, init_rng);
  e2_ = std::make_unique<Encoder>(spec_, init_rng);

  const auto enc_ch = spec_.encoder_channels();
  const auto dec_ch = spec_.decoder_channels();
  const int depth = spec_.depth;
  block_has_skip_.assign(depth, false);
  skip_encoder_idx_.assign(depth, -1);
  for (int j = 0; j < depth; ++j) {
    if (j > 0 && j >= depth - spec_.skip_depth) {
      block_has_skip_[j] = true;
      skip_encoder_idx_[j] = depth - 1 - j;
    }
  }

  for (int j = 0; j < depth; ++j) {
    int in_c = j == 0 ? 2 * enc_ch.back() : dec_ch[j - 1];
    if (block_has_skip_[j]) in_c += 2 * enc_ch[skip_encoder_idx_[j]];
    Sequential block;
    if (j < depth - 1) {
      block.add(std::make_unique<ConvTranspose2d>(in_c, dec_ch[j], init_rng));
      block.add(std::make_unique<InstanceNorm>());
      block.add(std::make_unique<ReLU>());
      if (j < 3 && spec_.dropout_rate > 0)
        block.add(std::make_unique<Dropout>(spec_.dropout_rate, &dropout_rng_));
    } else {
      block.add(std::make_unique<Conv2d>(in_c, kImageChannels, 3, 1, 1, init_rng));
      block.add(std::make_unique<Tanh>());
    }
    decoder_.push_back(std::move(block));
  }
}

Tensor4 Generator::forward(const Tensor4& src_in, const Tensor4& tgt_in,
                           const std::vector<WarpContext>& warps, bool training) {
  require(src_in.c == kGeneratorInputChannels && tgt_in.c == kGeneratorInputChannels,
          "Generator: inputs must have 21 channels (image + 18 heat maps)");
  require(src_in.h == spec_.input_h && src_in.w == spec_.input_w && tgt_in.same_shape(src_in),
          "Generator: input spatial size does not match the spec");
  require(static_cast<int>(warps.size()) == src_in.n,
          "Generator: one WarpContext per batch sample required");

  e1_feats_ = e1_->forward_all(src_in, training);
  e2_feats_ = e2_->forward_all(tgt_in, training);
  warps_cache_ = warps;

  const int depth = spec_.depth;
  warped_.assign(depth, Tensor4{});
  concat_dec_channels_.assign(depth, 0);

  Tensor4 x = concat_channels(e1_feats_.back(), e2_feats_.back());
  for (int j = 0; j < depth; ++j) {
    if (block_has_skip_[j]) {
      const int i = skip_encoder_idx_[j];
      const Tensor4& f = e1_feats_[i];
      Tensor4 wt(f.n, f.c, f.h, f.w);
      for (int s = 0; s < f.n; ++s)
        warp_and_merge_features(f.sample(s), f.c, f.h, f.w, warps[s].refined_masks,
                                warps[s].affines, spec_.input_h, spec_.input_w, wt.sample(s));
      concat_dec_channels_[j] = x.c;
      x = concat_channels(x, wt, e2_feats_[i]);
      warped_[j] = std::move(wt);
    }
    x = decoder_[j].forward(x, training);
  }
  return x;
}

void Generator::backward(const Tensor4& grad_out) {
  const int depth = spec_.depth;
  std::vector<Tensor4> e1_grads(depth), e2_grads(depth);
  Tensor4 g = grad_out;
  for (int j = depth - 1; j >= 0; --j) {
    g = decoder_[j].backward(g);
    if (block_has_skip_[j]) {
      const int i = skip_encoder_idx_[j];
      const int c_dec = concat_dec_channels_[j];
      const int c_skip = e1_feats_[i].c;
      Tensor4 g_warp = slice_channels(g, c_dec, c_skip);
      Tensor4 g_e2 = slice_channels(g, c_dec + c_skip, e2_feats_[i].c);
      const Tensor4& f = e1_feats_[i];
      Tensor4 g_e1(f.n, f.c, f.h, f.w);
      for (int s = 0; s < f.n; ++s)
        warp_and_merge_backward(g_warp.sample(s), f.c, f.h, f.w,
                                warps_cache_[s].refined_masks, warps_cache_[s].affines,
                                spec_.input_h, spec_.input_w, g_e1.sample(s));
      accumulate(e1_grads[i], g_e1);
      accumulate(e2_grads[i], g_e2);
      g = slice_channels(g, 0, c_dec);
    }
  }
  const int cb = e1_feats_.back().c;
  accumulate(e1_grads[depth - 1], slice_channels(g, 0, cb));
  accumulate(e2_grads[depth - 1], slice_channels(g, cb, e2_feats_.back().c));
  e1_->backward_all(std::move(e1_grads));
  e2_->backward_all(std::move(e2_grads));
}

std::vector<ParamRef> Generator::params() {
  std::vector<ParamRef> out;
  e1_->collect_params("G/E1", out);
  e2_->collect_params("G/E2", out);
  for (size_t j = 0; j < decoder_.size(); ++j)
    decoder_[j].collect_params("G/D/block" + std::to_string(j), out);
  return out;
}

Discriminator::Discriminator(const DiscriminatorSpec& spec, std::mt19937_64& init_rng)
    : spec_(spec) {
  const int b = spec.base_channels;
  const int ch[4] = {b, 2 * b, 4 * b, 8 * b};
  int in_c = spec.in_channels;
  for (int i = 0; i < 4; ++i) {
    net_.add(std::make_unique<Conv2d>(in_c, ch[i], 4, 2, 1, init_rng));
    if (i > 0) net_.add(std::make_unique<InstanceNorm>());
    net_.add(std::make_unique<ReLU>());
    in_c = ch[i];
  }
  // Final d1 block: no norm, sigmoid instead of ReLU.
  net_.add(std::make_unique<Conv2d>(in_c, 1, 4, 2, 1, init_rng));
  net_.add(std::make_unique<Sigmoid>());
}

Tensor4 Discriminator::forward(const Tensor4& x, bool training) {
  require(x.c == spec_.in_channels, "Discriminator: channel count mismatch");
  return net_.forward(x, training);
}

Tensor4 Discriminator::backward(const Tensor4& grad_out) { return net_.backward(grad_out); }

std::vector<ParamRef> Discriminator::params() {
  std::vector<ParamRef> out;
  net_.collect_params("D", out);
  return out;
}

}  // namespace pcgan
