#include "pcgan/partition.hpp"

namespace pcgan {

namespace {
Image apply_mask(const Image& image, const Grid& body, bool keep_person, double fill) {
  require(image.h == body.h && image.w == body.w, "mask/image shape mismatch");
  Image out(image.h, image.w);
  for (int ch = 0; ch < 3; ++ch)
    for (int r = 0; r < image.h; ++r)
      for (int c = 0; c < image.w; ++c) {
        const bool keep = keep_person ? body.at(r, c) != 0.0 : body.at(r, c) == 0.0;
        out.at(ch, r, c) = keep ? image.at(ch, r, c) : fill;
      }
  return out;
}
}  // namespace

Image split_background(const Image& image, const Grid& body, double fill) {
  return apply_mask(image, body, false, fill);
}

Image split_foreground(const Image& image, const Grid& body, double fill) {
  return apply_mask(image, body, true, fill);
}

std::array<Grid, kNumParts> refine_part_masks(const Grid& body, const RegionMaskSet& regions) {
  for (const Grid& g : regions.regions)
    require(g.same_shape(body), "refine_part_masks: shape mismatch");
  std::array<Grid, kNumParts> refined;
  Grid limb_union(body.h, body.w, 0.0);
  for (int i = 1; i < kNumParts; ++i) {
    refined[i] = Grid(body.h, body.w, 0.0);
    for (size_t k = 0; k < body.v.size(); ++k) {
      const double m = body.v[k] * regions.regions[i].v[k];
      refined[i].v[k] = m;
      if (m != 0.0) limb_union.v[k] = 1.0;
    }
  }
  refined[kTorso] = Grid(body.h, body.w, 0.0);
  for (size_t k = 0; k < body.v.size(); ++k)
    refined[kTorso].v[k] = (body.v[k] != 0.0 && limb_union.v[k] == 0.0) ? 1.0 : 0.0;
  return refined;
}

}  // namespace pcgan
