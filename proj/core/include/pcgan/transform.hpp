#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "pcgan/geometry.hpp"
#include "pcgan/grid.hpp"

namespace pcgan {

/// 2-D affine map on (row, col): out = A * p + t.
struct Affine2 {
  double a00 = 1, a01 = 0, a10 = 0, a11 = 1;
  double t0 = 0, t1 = 0;

  Landmark apply(const Landmark& p) const {
    return {a00 * p.row + a01 * p.col + t0, a10 * p.row + a11 * p.col + t1};
  }
  double det() const { return a00 * a11 - a01 * a10; }
  std::optional<Affine2> inverse() const;
  bool is_identity() const {
    return a00 == 1 && a01 == 0 && a10 == 0 && a11 == 1 && t0 == 0 && t1 == 0;
  }
};

/// One fitted affine per body sub-part; invalid parts carry the identity.
struct PartAffineSet {
  std::array<Affine2, kNumParts> transforms;
  std::array<bool, kNumParts> valid{};
};

/// Least-squares affine fit over point correspondences (source -> target).
/// nullopt when the system is rank-deficient.
std::optional<Affine2> fit_affine_least_squares(
    const std::vector<std::pair<Landmark, Landmark>>& correspondences);

/// Fits one affine per part from the corners of the source and target region
/// polygons; the target polygons are built with the SOURCE body-shape index.
PartAffineSet fit_part_affines(const LandmarkSet& src, const LandmarkSet& tgt, double d_s_src);

/// Per-part masked warp of a (c, h, w) feature block, summed over parts.
/// Refined masks are at full resolution and max-pooled down; affines are at
/// full resolution and conjugated by the scale map. Nearest-neighbor gather,
/// out-of-frame reads as zero.
void warp_and_merge_features(const double* features, int c, int h, int w,
                             const std::array<Grid, kNumParts>& refined_masks,
                             const PartAffineSet& affines, int full_h, int full_w,
                             double* out);

/// Adjoint of warp_and_merge_features: scatters grad_out back to grad_in
/// (accumulates; caller zeroes grad_in).
void warp_and_merge_backward(const double* grad_out, int c, int h, int w,
                             const std::array<Grid, kNumParts>& refined_masks,
                             const PartAffineSet& affines, int full_h, int full_w,
                             double* grad_in);

/// Max-pool downscale of a full-resolution mask to (h, w).
Grid downscale_mask(const Grid& mask, int h, int w);

/// Convenience wrapper over channel grids.
std::vector<Grid> warp_and_merge_features(const std::vector<Grid>& features,
                                          const std::array<Grid, kNumParts>& refined_masks,
                                          const PartAffineSet& affines, int full_h, int full_w);

}  // namespace pcgan
