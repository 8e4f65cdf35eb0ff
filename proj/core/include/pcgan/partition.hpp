#pragma once

#include <array>

#include "pcgan/geometry.hpp"
#include "pcgan/grid.hpp"

namespace pcgan {

/// Body mask plus the coarse region masks and the refined per-part masks.
/// refined[0] (torso) is the remainder of the body after removing parts 2-10,
/// so the union of the refined masks reproduces the body mask exactly.
struct MaskSet {
  Grid body;
  RegionMaskSet regions;
  std::array<Grid, kNumParts> refined;
};

/// Keeps pixels where the body mask is 0 and sets the person to fill.
/// fill=0 is mid-gray in [-1,1] space.
Image split_background(const Image& image, const Grid& body, double fill = 0.0);

/// Keeps pixels where the body mask is 1 and sets the background to fill.
Image split_foreground(const Image& image, const Grid& body, double fill = 0.0);

/// refined(i) = body * regions(i) for parts 2-10; torso = body minus their union.
std::array<Grid, kNumParts> refine_part_masks(const Grid& body, const RegionMaskSet& regions);

}  // namespace pcgan
