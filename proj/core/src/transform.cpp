#include "pcgan/transform.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace pcgan {

std::optional<Affine2> Affine2::inverse() const {
  const double d = det();
  if (std::abs(d) < 1e-12) return std::nullopt;
  Affine2 inv;
  inv.a00 = a11 / d;
  inv.a01 = -a01 / d;
  inv.a10 = -a10 / d;
  inv.a11 = a00 / d;
  inv.t0 = -(inv.a00 * t0 + inv.a01 * t1);
  inv.t1 = -(inv.a10 * t0 + inv.a11 * t1);
  return inv;
}

std::optional<Affine2> fit_affine_least_squares(
    const std::vector<std::pair<Landmark, Landmark>>& correspondences) {
  const int n = static_cast<int>(correspondences.size());
  if (n < 3) return std::nullopt;
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs_row(n), rhs_col(n);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = correspondences[i].first.row;
    design(i, 1) = correspondences[i].first.col;
    design(i, 2) = 1.0;
    rhs_row(i) = correspondences[i].second.row;
    rhs_col(i) = correspondences[i].second.col;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) return std::nullopt;
  const Eigen::Vector3d row_params = qr.solve(rhs_row);
  const Eigen::Vector3d col_params = qr.solve(rhs_col);
  Affine2 out;
  out.a00 = row_params(0);
  out.a01 = row_params(1);
  out.t0 = row_params(2);
  out.a10 = col_params(0);
  out.a11 = col_params(1);
  out.t1 = col_params(2);
  return out;
}

PartAffineSet fit_part_affines(const LandmarkSet& src, const LandmarkSet& tgt, double d_s_src) {
  require(d_s_src > 0, "fit_part_affines: d_s_src must be positive");
  const auto src_polys = region_polygons(src, d_s_src);
  // Target regions deliberately use the source body-shape index.
  const auto tgt_polys = region_polygons(tgt, d_s_src);
  PartAffineSet set;
  for (int i = 0; i < kNumParts; ++i) {
    set.transforms[i] = Affine2{};
    set.valid[i] = false;
    if (!src_polys[i] || !tgt_polys[i]) continue;
    const auto& sp = src_polys[i]->pts;
    const auto& tp = tgt_polys[i]->pts;
    if (sp.size() != tp.size()) continue;
    std::vector<std::pair<Landmark, Landmark>> corr;
    for (size_t k = 0; k < sp.size(); ++k) corr.emplace_back(sp[k], tp[k]);
    const auto fit = fit_affine_least_squares(corr);
    if (!fit || std::abs(fit->det()) < 1e-12) continue;
    set.transforms[i] = *fit;
    set.valid[i] = true;
  }
  return set;
}

Grid downscale_mask(const Grid& mask, int h, int w) {
  require(h > 0 && w > 0 && mask.h % h == 0 && mask.w % w == 0,
          "downscale_mask: non-integer scale ratio");
  const int sh = mask.h / h, sw = mask.w / w;
  Grid out(h, w, 0.0);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double m = 0.0;
      for (int dr = 0; dr < sh && m == 0.0; ++dr)
        for (int dc = 0; dc < sw; ++dc)
          if (mask.at(r * sh + dr, c * sw + dc) != 0.0) {
            m = 1.0;
            break;
          }
      out.at(r, c) = m;
    }
  return out;
}

namespace {

struct PartPlan {
  Grid mask;      // at feature resolution
  Affine2 inv;    // inverse affine in feature coordinates
};

// Downscaled masks plus inverse affines conjugated into feature coordinates.
std::vector<PartPlan> plan_parts(int h, int w, const std::array<Grid, kNumParts>& refined_masks,
                                 const PartAffineSet& affines, int full_h, int full_w) {
  require(h > 0 && w > 0 && full_h % h == 0 && full_w % w == 0,
          "warp_and_merge_features: non-integer scale ratio");
  const double sh = static_cast<double>(full_h) / h;
  const double sw = static_cast<double>(full_w) / w;
  std::vector<PartPlan> plans;
  plans.reserve(kNumParts);
  for (int i = 0; i < kNumParts; ++i) {
    PartPlan plan;
    plan.mask = downscale_mask(refined_masks[i], h, w);
    Affine2 feat = affines.transforms[i];
    // Conjugate by the (diagonal) scale map: A_f = S^-1 A S, t_f = S^-1 t.
    feat.a01 *= sw / sh;
    feat.a10 *= sh / sw;
    feat.t0 /= sh;
    feat.t1 /= sw;
    const auto inv = feat.inverse();
    plan.inv = inv ? *inv : Affine2{};
    plans.push_back(std::move(plan));
  }
  return plans;
}

}  // namespace

void warp_and_merge_features(const double* features, int c, int h, int w,
                             const std::array<Grid, kNumParts>& refined_masks,
                             const PartAffineSet& affines, int full_h, int full_w,
                             double* out) {
  const auto plans = plan_parts(h, w, refined_masks, affines, full_h, full_w);
  const size_t plane = static_cast<size_t>(h) * w;
  std::fill(out, out + static_cast<size_t>(c) * plane, 0.0);
  for (const PartPlan& plan : plans) {
    for (int r = 0; r < h; ++r)
      for (int col = 0; col < w; ++col) {
        const Landmark p = plan.inv.apply({static_cast<double>(r), static_cast<double>(col)});
        const long pr = std::lround(p.row), pc = std::lround(p.col);
        if (pr < 0 || pr >= h || pc < 0 || pc >= w) continue;
        const double m = plan.mask.at(static_cast<int>(pr), static_cast<int>(pc));
        if (m == 0.0) continue;
        const size_t src = static_cast<size_t>(pr) * w + pc;
        const size_t dst = static_cast<size_t>(r) * w + col;
        for (int ch = 0; ch < c; ++ch) out[ch * plane + dst] += m * features[ch * plane + src];
      }
  }
}

void warp_and_merge_backward(const double* grad_out, int c, int h, int w,
                             const std::array<Grid, kNumParts>& refined_masks,
                             const PartAffineSet& affines, int full_h, int full_w,
                             double* grad_in) {
  const auto plans = plan_parts(h, w, refined_masks, affines, full_h, full_w);
  const size_t plane = static_cast<size_t>(h) * w;
  for (const PartPlan& plan : plans) {
    for (int r = 0; r < h; ++r)
      for (int col = 0; col < w; ++col) {
        const Landmark p = plan.inv.apply({static_cast<double>(r), static_cast<double>(col)});
        const long pr = std::lround(p.row), pc = std::lround(p.col);
        if (pr < 0 || pr >= h || pc < 0 || pc >= w) continue;
        const double m = plan.mask.at(static_cast<int>(pr), static_cast<int>(pc));
        if (m == 0.0) continue;
        const size_t src = static_cast<size_t>(pr) * w + pc;
        const size_t dst = static_cast<size_t>(r) * w + col;
        for (int ch = 0; ch < c; ++ch)
          grad_in[ch * plane + src] += m * grad_out[ch * plane + dst];
      }
  }
}

std::vector<Grid> warp_and_merge_features(const std::vector<Grid>& features,
                                          const std::array<Grid, kNumParts>& refined_masks,
                                          const PartAffineSet& affines, int full_h, int full_w) {
  require(!features.empty(), "warp_and_merge_features: empty feature block");
  const int c = static_cast<int>(features.size());
  const int h = features[0].h, w = features[0].w;
  std::vector<double> flat(static_cast<size_t>(c) * h * w);
  for (int ch = 0; ch < c; ++ch)
    std::copy(features[ch].v.begin(), features[ch].v.end(),
              flat.begin() + static_cast<size_t>(ch) * h * w);
  std::vector<double> out_flat(flat.size());
  warp_and_merge_features(flat.data(), c, h, w, refined_masks, affines, full_h, full_w,
                          out_flat.data());
  std::vector<Grid> out(c, Grid(h, w));
  for (int ch = 0; ch < c; ++ch)
    std::copy(out_flat.begin() + static_cast<size_t>(ch) * h * w,
              out_flat.begin() + static_cast<size_t>(ch + 1) * h * w, out[ch].v.begin());
  return out;
}

}  // namespace pcgan
