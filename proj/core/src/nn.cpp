#include "pcgan/nn.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>

namespace pcgan {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRowMat = Eigen::Map<RowMat>;
using ConstMapRowMat = Eigen::Map<const RowMat>;

namespace {

int conv_out_dim(int in, int k, int s, int p) { return (in + 2 * p - k) / s + 1; }

// x: one sample (c, h, w); cols: (c*k*k, out_h*out_w) column-major.
void im2col(const double* x, int c, int h, int w, int k, int s, int p, Eigen::MatrixXd& cols) {
  const int oh = conv_out_dim(h, k, s, p);
  const int ow = conv_out_dim(w, k, s, p);
  cols.resize(static_cast<Eigen::Index>(c) * k * k, static_cast<Eigen::Index>(oh) * ow);
  for (int oy = 0; oy < oh; ++oy)
    for (int ox = 0; ox < ow; ++ox) {
      const Eigen::Index l = static_cast<Eigen::Index>(oy) * ow + ox;
      for (int ci = 0; ci < c; ++ci)
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy * s - p + ky;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox * s - p + kx;
            const Eigen::Index row = (static_cast<Eigen::Index>(ci) * k + ky) * k + kx;
            cols(row, l) = (iy >= 0 && iy < h && ix >= 0 && ix < w)
                               ? x[(static_cast<size_t>(ci) * h + iy) * w + ix]
                               : 0.0;
          }
        }
    }
}

// Adjoint of im2col: scatter-adds cols back into x (caller zeroes x).
void col2im(const Eigen::MatrixXd& cols, int c, int h, int w, int k, int s, int p, double* x) {
  const int oh = conv_out_dim(h, k, s, p);
  const int ow = conv_out_dim(w, k, s, p);
  for (int oy = 0; oy < oh; ++oy)
    for (int ox = 0; ox < ow; ++ox) {
      const Eigen::Index l = static_cast<Eigen::Index>(oy) * ow + ox;
      for (int ci = 0; ci < c; ++ci)
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy * s - p + ky;
          if (iy < 0 || iy >= h) continue;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox * s - p + kx;
            if (ix < 0 || ix >= w) continue;
            const Eigen::Index row = (static_cast<Eigen::Index>(ci) * k + ky) * k + kx;
            x[(static_cast<size_t>(ci) * h + iy) * w + ix] += cols(row, l);
          }
        }
    }
}

void init_weights(std::vector<double>& w, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 0.02);
  for (double& x : w) x = dist(rng);
}

}  // namespace

void Layer::collect_params(const std::string&, std::vector<ParamRef>&) {}

Tensor4 concat_channels(const Tensor4& a, const Tensor4& b) {
  require(a.n == b.n && a.h == b.h && a.w == b.w, "concat_channels: shape mismatch");
  Tensor4 out(a.n, a.c + b.c, a.h, a.w);
  const size_t plane_a = static_cast<size_t>(a.c) * a.h * a.w;
  const size_t plane_b = static_cast<size_t>(b.c) * b.h * b.w;
  for (int i = 0; i < a.n; ++i) {
    std::memcpy(out.sample(i), a.sample(i), plane_a * sizeof(double));
    std::memcpy(out.sample(i) + plane_a, b.sample(i), plane_b * sizeof(double));
  }
  return out;
}

Tensor4 concat_channels(const Tensor4& a, const Tensor4& b, const Tensor4& c) {
  return concat_channels(concat_channels(a, b), c);
}

Tensor4 slice_channels(const Tensor4& x, int from, int count) {
  require(from >= 0 && from + count <= x.c, "slice_channels: out of range");
  Tensor4 out(x.n, count, x.h, x.w);
  const size_t plane = static_cast<size_t>(x.h) * x.w;
  for (int i = 0; i < x.n; ++i)
    std::memcpy(out.sample(i), x.sample(i) + from * plane, count * plane * sizeof(double));
  return out;
}

void add_into_channels(Tensor4& dst, int from, const Tensor4& src) {
  require(from >= 0 && from + src.c <= dst.c && dst.n == src.n && dst.h == src.h &&
              dst.w == src.w,
          "add_into_channels: shape mismatch");
  const size_t plane = static_cast<size_t>(src.h) * src.w;
  for (int i = 0; i < dst.n; ++i) {
    double* d = dst.sample(i) + from * plane;
    const double* s = src.sample(i);
    for (size_t k = 0; k < src.sample_size(); ++k) d[k] += s[k];
  }
}

Conv2d::Conv2d(int in_c, int out_c, int kernel, int stride, int pad, std::mt19937_64& init_rng)
    : in_c_(in_c), out_c_(out_c), k_(kernel), stride_(stride), pad_(pad) {
  weight_.resize(static_cast<size_t>(out_c) * in_c * kernel * kernel);
  bias_.assign(out_c, 0.0);
  init_weights(weight_, init_rng);
  grad_weight_.assign(weight_.size(), 0.0);
  grad_bias_.assign(bias_.size(), 0.0);
}

Tensor4 Conv2d::forward(const Tensor4& x, bool) {
  require(x.c == in_c_, "Conv2d: channel mismatch");
  input_ = x;
  const int oh = conv_out_dim(x.h, k_, stride_, pad_);
  const int ow = conv_out_dim(x.w, k_, stride_, pad_);
  Tensor4 y(x.n, out_c_, oh, ow);
  ConstMapRowMat wmat(weight_.data(), out_c_, static_cast<Eigen::Index>(in_c_) * k_ * k_);
  Eigen::MatrixXd cols;
  for (int i = 0; i < x.n; ++i) {
    im2col(x.sample(i), in_c_, x.h, x.w, k_, stride_, pad_, cols);
    MapRowMat ymat(y.sample(i), out_c_, static_cast<Eigen::Index>(oh) * ow);
    ymat.noalias() = wmat * cols;
    for (int oc = 0; oc < out_c_; ++oc) ymat.row(oc).array() += bias_[oc];
  }
  return y;
}

Tensor4 Conv2d::backward(const Tensor4& grad_out) {
  const Tensor4& x = input_;
  const int oh = grad_out.h, ow = grad_out.w;
  Tensor4 grad_x(x.n, x.c, x.h, x.w);
  ConstMapRowMat wmat(weight_.data(), out_c_, static_cast<Eigen::Index>(in_c_) * k_ * k_);
  MapRowMat gwmat(grad_weight_.data(), out_c_, static_cast<Eigen::Index>(in_c_) * k_ * k_);
  Eigen::MatrixXd cols, grad_cols;
  for (int i = 0; i < x.n; ++i) {
    im2col(x.sample(i), in_c_, x.h, x.w, k_, stride_, pad_, cols);
    ConstMapRowMat gmat(grad_out.sample(i), out_c_, static_cast<Eigen::Index>(oh) * ow);
    gwmat.noalias() += gmat * cols.transpose();
    for (int oc = 0; oc < out_c_; ++oc) grad_bias_[oc] += gmat.row(oc).sum();
    grad_cols.noalias() = wmat.transpose() * gmat;
    col2im(grad_cols, in_c_, x.h, x.w, k_, stride_, pad_, grad_x.sample(i));
  }
  return grad_x;
}

void Conv2d::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + "/weight", &weight_, &grad_weight_});
  out.push_back({prefix + "/bias", &bias_, &grad_bias_});
}

ConvTranspose2d::ConvTranspose2d(int in_c, int out_c, std::mt19937_64& init_rng)
    : in_c_(in_c), out_c_(out_c) {
  weight_.resize(static_cast<size_t>(in_c) * out_c * k_ * k_);
  bias_.assign(out_c, 0.0);
  init_weights(weight_, init_rng);
  grad_weight_.assign(weight_.size(), 0.0);
  grad_bias_.assign(bias_.size(), 0.0);
}

Tensor4 ConvTranspose2d::forward(const Tensor4& x, bool) {
  require(x.c == in_c_, "ConvTranspose2d: channel mismatch");
  input_ = x;
  const int oh = (x.h - 1) * stride_ - 2 * pad_ + k_;
  const int ow = (x.w - 1) * stride_ - 2 * pad_ + k_;
  Tensor4 y(x.n, out_c_, oh, ow);
  ConstMapRowMat vmat(weight_.data(), in_c_, static_cast<Eigen::Index>(out_c_) * k_ * k_);
  Eigen::MatrixXd cols;
  for (int i = 0; i < x.n; ++i) {
    ConstMapRowMat xmat(x.sample(i), in_c_, static_cast<Eigen::Index>(x.h) * x.w);
    cols.noalias() = vmat.transpose() * xmat;
    col2im(cols, out_c_, oh, ow, k_, stride_, pad_, y.sample(i));
    double* ys = y.sample(i);
    const size_t plane = static_cast<size_t>(oh) * ow;
    for (int oc = 0; oc < out_c_; ++oc)
      for (size_t k = 0; k < plane; ++k) ys[oc * plane + k] += bias_[oc];
  }
  return y;
}

Tensor4 ConvTranspose2d::backward(const Tensor4& grad_out) {
  const Tensor4& x = input_;
  Tensor4 grad_x(x.n, x.c, x.h, x.w);
  ConstMapRowMat vmat(weight_.data(), in_c_, static_cast<Eigen::Index>(out_c_) * k_ * k_);
  MapRowMat gvmat(grad_weight_.data(), in_c_, static_cast<Eigen::Index>(out_c_) * k_ * k_);
  Eigen::MatrixXd gcols;
  for (int i = 0; i < x.n; ++i) {
    im2col(grad_out.sample(i), out_c_, grad_out.h, grad_out.w, k_, stride_, pad_, gcols);
    ConstMapRowMat xmat(x.sample(i), in_c_, static_cast<Eigen::Index>(x.h) * x.w);
    MapRowMat gxmat(grad_x.sample(i), in_c_, static_cast<Eigen::Index>(x.h) * x.w);
    gxmat.noalias() = vmat * gcols;
    gvmat.noalias() += xmat * gcols.transpose();
    const double* gs = grad_out.sample(i);
    const size_t plane = static_cast<size_t>(grad_out.h) * grad_out.w;
    for (int oc = 0; oc < out_c_; ++oc)
      for (size_t k = 0; k < plane; ++k) grad_bias_[oc] += gs[oc * plane + k];
  }
  return grad_x;
}

void ConvTranspose2d::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + "/weight", &weight_, &grad_weight_});
  out.push_back({prefix + "/bias", &bias_, &grad_bias_});
}

Tensor4 InstanceNorm::forward(const Tensor4& x, bool) {
  Tensor4 y(x.n, x.c, x.h, x.w);
  const size_t plane = static_cast<size_t>(x.h) * x.w;
  inv_std_.assign(static_cast<size_t>(x.n) * x.c, 0.0);
  for (int i = 0; i < x.n; ++i)
    for (int ci = 0; ci < x.c; ++ci) {
      const double* xs = x.sample(i) + ci * plane;
      double* ys = y.sample(i) + ci * plane;
      double mu = 0;
      for (size_t k = 0; k < plane; ++k) mu += xs[k];
      mu /= plane;
      double var = 0;
      for (size_t k = 0; k < plane; ++k) var += (xs[k] - mu) * (xs[k] - mu);
      var /= plane;
      const double inv = 1.0 / std::sqrt(var + kEps);
      inv_std_[static_cast<size_t>(i) * x.c + ci] = inv;
      for (size_t k = 0; k < plane; ++k) ys[k] = (xs[k] - mu) * inv;
    }
  normalized_ = y;
  return y;
}

Tensor4 InstanceNorm::backward(const Tensor4& g) {
  const Tensor4& xhat = normalized_;
  Tensor4 grad_x(g.n, g.c, g.h, g.w);
  const size_t plane = static_cast<size_t>(g.h) * g.w;
  for (int i = 0; i < g.n; ++i)
    for (int ci = 0; ci < g.c; ++ci) {
      const double* gs = g.sample(i) + ci * plane;
      const double* hs = xhat.sample(i) + ci * plane;
      double* out = grad_x.sample(i) + ci * plane;
      double gmean = 0, ghmean = 0;
      for (size_t k = 0; k < plane; ++k) {
        gmean += gs[k];
        ghmean += gs[k] * hs[k];
      }
      gmean /= plane;
      ghmean /= plane;
      const double inv = inv_std_[static_cast<size_t>(i) * g.c + ci];
      for (size_t k = 0; k < plane; ++k)
        out[k] = inv * (gs[k] - gmean - hs[k] * ghmean);
    }
  return grad_x;
}

Tensor4 ReLU::forward(const Tensor4& x, bool) {
  input_ = x;
  Tensor4 y = x;
  for (double& v : y.v) v = v > 0 ? v : 0.0;
  return y;
}

Tensor4 ReLU::backward(const Tensor4& g) {
  Tensor4 out = g;
  for (size_t k = 0; k < out.v.size(); ++k)
    if (input_.v[k] <= 0) out.v[k] = 0.0;
  return out;
}

Tensor4 Tanh::forward(const Tensor4& x, bool) {
  Tensor4 y = x;
  for (double& v : y.v) v = std::tanh(v);
  output_ = y;
  return y;
}

Tensor4 Tanh::backward(const Tensor4& g) {
  Tensor4 out = g;
  for (size_t k = 0; k < out.v.size(); ++k) out.v[k] *= 1.0 - output_.v[k] * output_.v[k];
  return out;
}

Tensor4 Sigmoid::forward(const Tensor4& x, bool) {
  Tensor4 y = x;
  for (double& v : y.v) v = 1.0 / (1.0 + std::exp(-v));
  output_ = y;
  return y;
}

Tensor4 Sigmoid::backward(const Tensor4& g) {
  Tensor4 out = g;
  for (size_t k = 0; k < out.v.size(); ++k)
    out.v[k] *= output_.v[k] * (1.0 - output_.v[k]);
  return out;
}

Tensor4 Dropout::forward(const Tensor4& x, bool training) {
  active_ = training && rate_ > 0.0;
  if (!active_) return x;
  const double keep = 1.0 - rate_;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  mask_.resize(x.v.size());
  Tensor4 y = x;
  for (size_t k = 0; k < x.v.size(); ++k) {
    mask_[k] = uni(*rng_) < keep ? 1.0 / keep : 0.0;
    y.v[k] *= mask_[k];
  }
  return y;
}

Tensor4 Dropout::backward(const Tensor4& g) {
  if (!active_) return g;
  Tensor4 out = g;
  for (size_t k = 0; k < out.v.size(); ++k) out.v[k] *= mask_[k];
  return out;
}

Tensor4 Sequential::forward(const Tensor4& x, bool training) {
  Tensor4 cur = x;
  for (auto& layer : layers_) cur = layer->forward(cur, training);
  return cur;
}

Tensor4 Sequential::backward(const Tensor4& grad_out) {
  Tensor4 cur = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) cur = (*it)->backward(cur);
  return cur;
}

void Sequential::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  for (size_t i = 0; i < layers_.size(); ++i)
    layers_[i]->collect_params(prefix + "/" + std::to_string(i), out);
}

Adam::Adam(std::vector<ParamRef> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const ParamRef& p : params_) {
    m_.emplace_back(p.value->size(), 0.0);
    v_.emplace_back(p.value->size(), 0.0);
  }
}

void Adam::zero_grad() {
  for (const ParamRef& p : params_) std::fill(p.grad->begin(), p.grad->end(), 0.0);
}

void Adam::step() {
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1_, step_count_);
  const double bc2 = 1.0 - std::pow(beta2_, step_count_);
  for (size_t i = 0; i < params_.size(); ++i) {
    std::vector<double>& val = *params_[i].value;
    const std::vector<double>& g = *params_[i].grad;
    for (size_t k = 0; k < val.size(); ++k) {
      m_[i][k] = beta1_ * m_[i][k] + (1.0 - beta1_) * g[k];
      v_[i][k] = beta2_ * v_[i][k] + (1.0 - beta2_) * g[k] * g[k];
      val[k] -= lr_ * (m_[i][k] / bc1) / (std::sqrt(v_[i][k] / bc2) + eps_);
    }
  }
}

}  // namespace pcgan
