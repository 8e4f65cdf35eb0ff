#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcgan/grid.hpp"

namespace pcgan {

// 18-keypoint ordering of the pose estimator output consumed by this pipeline.
enum LandmarkIndex : int {
  kNose = 0,
  kNeck = 1,
  kRShoulder = 2,
  kRElbow = 3,
  kRWrist = 4,
  kLShoulder = 5,
  kLElbow = 6,
  kLWrist = 7,
  kRHip = 8,
  kRKnee = 9,
  kRAnkle = 10,
  kLHip = 11,
  kLKnee = 12,
  kLAnkle = 13,
  kREye = 14,
  kLEye = 15,
  kREar = 16,
  kLEar = 17,
};
inline constexpr int kNumLandmarks = 18;
inline constexpr int kNumParts = 10;

// Body sub-part indexing (1-based in prose, 0-based in arrays):
//   1 torso, 2 head, 3 L upper arm, 4 L lower arm, 5 R upper arm,
//   6 R lower arm, 7 L upper leg, 8 L lower leg, 9 R upper leg, 10 R lower leg.
enum PartIndex : int {
  kTorso = 0,
  kHead = 1,
  kLUpperArm = 2,
  kLLowerArm = 3,
  kRUpperArm = 4,
  kRLowerArm = 5,
  kLUpperLeg = 6,
  kLLowerLeg = 7,
  kRUpperLeg = 8,
  kRLowerLeg = 9,
};

struct Landmark {
  double row = 0;
  double col = 0;
};

/// 18 optional keypoints for one person, pixel coordinates.
struct LandmarkSet {
  std::array<std::optional<Landmark>, kNumLandmarks> points;
  int image_height = 0;
  int image_width = 0;

  bool has(int j) const { return points[j].has_value(); }
  const Landmark& at(int j) const { return *points[j]; }
  int present_count() const;
  /// Throws std::invalid_argument on out-of-frame points.
  void validate() const;
};

/// 18 per-landmark scalar grids; channel j is all-zero iff landmark j is missing.
struct HeatMapStack {
  int h = 0;
  int w = 0;
  std::array<Grid, kNumLandmarks> channels;
};

/// 10 binary region masks, part order per PartIndex.
struct RegionMaskSet {
  std::array<Grid, kNumParts> regions;
};

/// Simple polygon, vertices as (row, col).
struct Polygon {
  std::vector<Landmark> pts;
};

struct MissingTorsoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-landmark exponential-falloff heat maps: exp(-|p - p_j| / sigma^2).
/// squared_distance switches to the Gaussian exp(-|p - p_j|^2 / sigma^2).
HeatMapStack heatmaps_from_landmarks(const LandmarkSet& landmarks, double sigma,
                                     bool squared_distance = false);

/// Mean of the two shoulder-to-hip distances. Throws MissingTorsoError when
/// any of the four torso landmarks is absent.
double body_shape_index(const LandmarkSet& landmarks);

/// Closed-polygon membership test for a point; boundary points are inside.
bool point_in_polygon(const Polygon& poly, double row, double col);

/// Region polygons for the 10 sub-parts; nullopt when a defining landmark is
/// missing (head needs at least one face landmark) or the part is degenerate.
std::array<std::optional<Polygon>, kNumParts> region_polygons(const LandmarkSet& landmarks,
                                                              double d_s);

/// Rasterizes region_polygons onto a (height, width) frame. A pixel belongs
/// to a region iff its center lies inside the closed polygon.
RegionMaskSet build_region_masks(const LandmarkSet& landmarks, double d_s, int height,
                                 int width);

}  // namespace pcgan
