#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pcgan/grid.hpp"

namespace pcgan {

/// Raw 8-bit image, HWC interleaved; channels is 1 (PGM) or 3 (PPM).
struct Image8 {
  int h = 0;
  int w = 0;
  int channels = 0;
  std::vector<uint8_t> v;

  uint8_t& at(int r, int c, int ch) {
    return v[(static_cast<size_t>(r) * w + c) * channels + ch];
  }
  uint8_t at(int r, int c, int ch) const {
    return v[(static_cast<size_t>(r) * w + c) * channels + ch];
  }
};

/// Reads a binary PPM (P6) or PGM (P5) file. Throws std::runtime_error with
/// the offending path on parse failure.
Image8 read_image8(const std::filesystem::path& path);
void write_image8(const std::filesystem::path& path, const Image8& img);

/// 8-bit value -> [-1, 1]: 2v/255 - 1. Round-trips exactly for all 256 values.
double normalize_u8(uint8_t v);
uint8_t denormalize_u8(double x);

Image image_from_8bit(const Image8& img);   // requires 3 channels
Image8 image_to_8bit(const Image& img);
Grid mask_from_8bit(const Image8& img);     // single channel; >=128 is person
Image8 mask_to_8bit(const Grid& mask);

}  // namespace pcgan
