#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pcgan {

/// Dense 2-D scalar field, row-major. Used for heat-map channels,
/// binary masks (values restricted to {0,1}) and single feature planes.
struct Grid {
  int h = 0;
  int w = 0;
  std::vector<double> v;

  Grid() = default;
  Grid(int h_, int w_, double fill = 0.0) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, fill) {}

  double& at(int r, int c) { return v[static_cast<size_t>(r) * w + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * w + c]; }

  bool same_shape(const Grid& o) const { return h == o.h && w == o.w; }
  bool all_zero() const {
    for (double x : v)
      if (x != 0.0) return false;
    return true;
  }
  double sum() const {
    double s = 0;
    for (double x : v) s += x;
    return s;
  }
};

/// 3-channel image, CHW layout, pixel values in [-1, 1].
struct Image {
  int h = 0;
  int w = 0;
  std::vector<double> v;  // size 3*h*w

  Image() = default;
  Image(int h_, int w_, double fill = 0.0) : h(h_), w(w_), v(static_cast<size_t>(3) * h_ * w_, fill) {}

  double& at(int ch, int r, int c) { return v[(static_cast<size_t>(ch) * h + r) * w + c]; }
  double at(int ch, int r, int c) const { return v[(static_cast<size_t>(ch) * h + r) * w + c]; }

  bool same_shape(const Image& o) const { return h == o.h && w == o.w; }
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace pcgan
