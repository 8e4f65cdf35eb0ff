#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pcgan/grid.hpp"

namespace pcgan {

/// NCHW double tensor.
struct Tensor4 {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<double> v;

  Tensor4() = default;
  Tensor4(int n_, int c_, int h_, int w_, double fill = 0.0)
      : n(n_), c(c_), h(h_), w(w_), v(static_cast<size_t>(n_) * c_ * h_ * w_, fill) {}

  size_t size() const { return v.size(); }
  size_t sample_size() const { return static_cast<size_t>(c) * h * w; }
  double* sample(int i) { return v.data() + i * sample_size(); }
  const double* sample(int i) const { return v.data() + i * sample_size(); }
  double& at(int ni, int ci, int y, int x) {
    return v[((static_cast<size_t>(ni) * c + ci) * h + y) * w + x];
  }
  double at(int ni, int ci, int y, int x) const {
    return v[((static_cast<size_t>(ni) * c + ci) * h + y) * w + x];
  }
  bool same_shape(const Tensor4& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }
};

Tensor4 concat_channels(const Tensor4& a, const Tensor4& b);
Tensor4 concat_channels(const Tensor4& a, const Tensor4& b, const Tensor4& c);
/// Channel slice [from, from+count).
Tensor4 slice_channels(const Tensor4& x, int from, int count);
/// Adds the channel slice [from, from+count) of dst += src.
void add_into_channels(Tensor4& dst, int from, const Tensor4& src);

/// Named view into a parameter and its gradient accumulator.
struct ParamRef {
  std::string name;
  std::vector<double>* value;
  std::vector<double>* grad;
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor4 forward(const Tensor4& x, bool training) = 0;
  /// Propagates grad w.r.t. the last forward input; accumulates param grads.
  virtual Tensor4 backward(const Tensor4& grad_out) = 0;
  virtual void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

class Conv2d : public Layer {
 public:
  Conv2d(int in_c, int out_c, int kernel, int stride, int pad, std::mt19937_64& init_rng);
  Tensor4 forward(const Tensor4& x, bool training) override;
  Tensor4 backward(const Tensor4& grad_out) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;

  int in_c_, out_c_, k_, stride_, pad_;
  std::vector<double> weight_;  // (out_c, in_c*k*k)
  std::vector<double> bias_;    // (out_c)
  std::vector<double> grad_weight_, grad_bias_;

 private:
  Tensor4 input_;
};

/// 4x4 stride-1/2 fractional-strided convolution: output doubles spatially.
class ConvTranspose2d : public Layer {
 public:
  ConvTranspose2d(int in_c, int out_c, std::mt19937_64& init_rng);
  Tensor4 forward(const Tensor4& x, bool training) override;
  Tensor4 backward(const Tensor4& grad_out) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;

  int in_c_, out_c_;
  static constexpr int k_ = 4, stride_ = 2, pad_ = 1;
  std::vector<double> weight_;  // (in_c, out_c*k*k)
  std::vector<double> bias_;
  std::vector<double> grad_weight_, grad_bias_;

 private:
  Tensor4 input_;
};

/// Per-sample, per-channel normalization over the spatial extent; no affine.
class InstanceNorm : public Layer {
 public:
  Tensor4 forward(const Tensor4& x, bool training) override;
  Tensor4 backward(const Tensor4& grad_out) override;

 private:
  static constexpr double kEps = 1e-5;
  Tensor4 normalized_;
  std::vector<double> inv_std_;  // per (n, c)
};

class ReLU : public Layer {
 public:
  Tensor4 forward(const Tensor4& x, bool training) override;
  Tensor4 backward(const Tensor4& grad_out) override;

 private:
  Tensor4 input_;
};

class Tanh : public Layer {
 public:
  Tensor4 forward(const Tensor4& x, bool training) override;
  Tensor4 backward(const Tensor4& grad_out) override;

 private:
  Tensor4 output_;
};

class Sigmoid : public Layer {
 public:
  Tensor4 forward(const Tensor4& x, bool training) override;
  Tensor4 backward(const Tensor4& grad_out) override;

 private:
  Tensor4 output_;
};

/// Inverted dropout; identity when training=false.
class Dropout : public Layer {
 public:
  Dropout(double rate, std::mt19937_64* rng) : rate_(rate), rng_(rng) {}
  Tensor4 forward(const Tensor4& x, bool training) override;
  Tensor4 backward(const Tensor4& grad_out) override;

 private:
  double rate_;
  std::mt19937_64* rng_;
  std::vector<double> mask_;
  bool active_ = false;
};

class Sequential : public Layer {
 public:
  void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }
  Tensor4 forward(const Tensor4& x, bool training) override;
  Tensor4 backward(const Tensor4& grad_out) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
  size_t size() const { return layers_.size(); }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

class Adam {
 public:
  Adam(std::vector<ParamRef> params, double lr, double beta1, double beta2, double eps = 1e-8);
  void zero_grad();
  void step();
  const std::vector<ParamRef>& params() const { return params_; }

  // Serialized state: first/second moments and the step counter.
  long step_count_ = 0;
  std::vector<std::vector<double>> m_, v_;

 private:
  std::vector<ParamRef> params_;
  double lr_, beta1_, beta2_, eps_;
};

}  // namespace pcgan
