#include "pcgan/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace pcgan {

namespace {

constexpr double kEdgeEps = 1e-9;

double dist(const Landmark& a, const Landmark& b) {
  return std::hypot(a.row - b.row, a.col - b.col);
}

// Distance from point to closed segment [a,b].
double point_segment_distance(double r, double c, const Landmark& a, const Landmark& b) {
  const double dr = b.row - a.row, dc = b.col - a.col;
  const double len2 = dr * dr + dc * dc;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((r - a.row) * dr + (c - a.col) * dc) / len2, 0.0, 1.0);
  return std::hypot(r - (a.row + t * dr), c - (a.col + t * dc));
}

std::optional<Polygon> limb_rectangle(const LandmarkSet& lm, int a, int b, double d_s) {
  if (!lm.has(a) || !lm.has(b)) return std::nullopt;
  const Landmark p = lm.at(a), q = lm.at(b);
  const double len = dist(p, q);
  if (len < kEdgeEps) return std::nullopt;
  const double ur = (q.row - p.row) / len, uc = (q.col - p.col) / len;
  const double hw = 0.15 * d_s;  // rectangle width 0.3 * d_s
  const double nr = -uc * hw, nc = ur * hw;
  Polygon poly;
  poly.pts = {{p.row + nr, p.col + nc},
              {q.row + nr, q.col + nc},
              {q.row - nr, q.col - nc},
              {p.row - nr, p.col - nc}};
  return poly;
}

}  // namespace

int LandmarkSet::present_count() const {
  int n = 0;
  for (const auto& p : points)
    if (p) ++n;
  return n;
}

void LandmarkSet::validate() const {
  for (const auto& p : points) {
    if (!p) continue;
    if (p->row < 0 || p->row >= image_height || p->col < 0 || p->col >= image_width)
      throw std::invalid_argument("landmark out of image frame");
  }
}

HeatMapStack heatmaps_from_landmarks(const LandmarkSet& landmarks, double sigma,
                                     bool squared_distance) {
  require(sigma > 0, "heatmaps_from_landmarks: sigma must be positive");
  const int h = landmarks.image_height, w = landmarks.image_width;
  HeatMapStack stack;
  stack.h = h;
  stack.w = w;
  const double s2 = sigma * sigma;
  for (int j = 0; j < kNumLandmarks; ++j) {
    Grid& g = stack.channels[j];
    g = Grid(h, w, 0.0);
    if (!landmarks.has(j)) continue;
    const Landmark p = landmarks.at(j);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const double d = std::hypot(r - p.row, c - p.col);
        g.at(r, c) = std::exp(-(squared_distance ? d * d : d) / s2);
      }
    }
  }
  return stack;
}

double body_shape_index(const LandmarkSet& landmarks) {
  for (int j : {kRShoulder, kLShoulder, kRHip, kLHip})
    if (!landmarks.has(j)) throw MissingTorsoError("body_shape_index: torso landmark missing");
  const double right = dist(landmarks.at(kRHip), landmarks.at(kRShoulder));
  const double left = dist(landmarks.at(kLHip), landmarks.at(kLShoulder));
  return 0.5 * (right + left);
}

bool point_in_polygon(const Polygon& poly, double row, double col) {
  const auto& pts = poly.pts;
  const size_t n = pts.size();
  if (n < 2) return false;
  for (size_t i = 0; i < n; ++i) {
    const Landmark& a = pts[i];
    const Landmark& b = pts[(i + 1) % n];
    if (point_segment_distance(row, col, a, b) <= kEdgeEps) return true;
  }
  // Even-odd crossing count; row plays y, col plays x.
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Landmark& a = pts[i];
    const Landmark& b = pts[j];
    if ((a.row > row) != (b.row > row)) {
      const double x = a.col + (row - a.row) / (b.row - a.row) * (b.col - a.col);
      if (col < x) inside = !inside;
    }
  }
  return inside;
}

std::array<std::optional<Polygon>, kNumParts> region_polygons(const LandmarkSet& lm, double d_s) {
  require(d_s > 0, "region_polygons: d_s must be positive");
  std::array<std::optional<Polygon>, kNumParts> polys;

  // Torso: shoulder/hip quadrilateral, vertices pushed out from the centroid
  // by 0.15 * d_s.
  if (lm.has(kRShoulder) && lm.has(kLShoulder) && lm.has(kLHip) && lm.has(kRHip)) {
    const std::array<Landmark, 4> q = {lm.at(kRShoulder), lm.at(kLShoulder), lm.at(kLHip),
                                       lm.at(kRHip)};
    Landmark centroid{0, 0};
    for (const auto& p : q) {
      centroid.row += p.row / 4.0;
      centroid.col += p.col / 4.0;
    }
    Polygon poly;
    for (const auto& p : q) {
      const double d = dist(p, centroid);
      if (d < kEdgeEps) {
        poly.pts.push_back(p);
      } else {
        const double k = 0.15 * d_s / d;
        poly.pts.push_back({p.row + (p.row - centroid.row) * k,
                            p.col + (p.col - centroid.col) * k});
      }
    }
    polys[kTorso] = poly;
  }

  // Head: axis-aligned square, side 0.8 * d_s, centered at the centroid of
  // the present face landmarks.
  {
    Landmark centroid{0, 0};
    int n = 0;
    for (int j : {kNose, kREye, kLEye, kREar, kLEar}) {
      if (!lm.has(j)) continue;
      centroid.row += lm.at(j).row;
      centroid.col += lm.at(j).col;
      ++n;
    }
    if (n > 0) {
      centroid.row /= n;
      centroid.col /= n;
      const double half = 0.4 * d_s;
      Polygon poly;
      poly.pts = {{centroid.row - half, centroid.col - half},
                  {centroid.row - half, centroid.col + half},
                  {centroid.row + half, centroid.col + half},
                  {centroid.row + half, centroid.col - half}};
      polys[kHead] = poly;
    }
  }

  polys[kLUpperArm] = limb_rectangle(lm, kLShoulder, kLElbow, d_s);
  polys[kLLowerArm] = limb_rectangle(lm, kLElbow, kLWrist, d_s);
  polys[kRUpperArm] = limb_rectangle(lm, kRShoulder, kRElbow, d_s);
  polys[kRLowerArm] = limb_rectangle(lm, kRElbow, kRWrist, d_s);
  polys[kLUpperLeg] = limb_rectangle(lm, kLHip, kLKnee, d_s);
  polys[kLLowerLeg] = limb_rectangle(lm, kLKnee, kLAnkle, d_s);
  polys[kRUpperLeg] = limb_rectangle(lm, kRHip, kRKnee, d_s);
  polys[kRLowerLeg] = limb_rectangle(lm, kRKnee, kRAnkle, d_s);
  return polys;
}

RegionMaskSet build_region_masks(const LandmarkSet& landmarks, double d_s, int height,
                                 int width) {
  require(d_s > 0, "build_region_masks: d_s must be positive");
  const auto polys = region_polygons(landmarks, d_s);
  RegionMaskSet masks;
  for (int i = 0; i < kNumParts; ++i) {
    masks.regions[i] = Grid(height, width, 0.0);
    if (!polys[i]) continue;
    const Polygon& poly = *polys[i];
    double rmin = poly.pts[0].row, rmax = rmin, cmin = poly.pts[0].col, cmax = cmin;
    for (const auto& p : poly.pts) {
      rmin = std::min(rmin, p.row);
      rmax = std::max(rmax, p.row);
      cmin = std::min(cmin, p.col);
      cmax = std::max(cmax, p.col);
    }
    const int r0 = std::max(0, static_cast<int>(std::floor(rmin)));
    const int r1 = std::min(height - 1, static_cast<int>(std::ceil(rmax)));
    const int c0 = std::max(0, static_cast<int>(std::floor(cmin)));
    const int c1 = std::min(width - 1, static_cast<int>(std::ceil(cmax)));
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c)
        if (point_in_polygon(poly, r, c)) masks.regions[i].at(r, c) = 1.0;
  }
  return masks;
}

}  // namespace pcgan
