#include "pcgan/image_io.hpp"

#include <cmath>
#include <fstream>

namespace pcgan {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& why) {
  throw std::runtime_error("image io: " + path.string() + ": " + why);
}

// Skips whitespace and '#' comments between header tokens.
int read_header_int(std::istream& in) {
  int ch = in.peek();
  while (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '#') {
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      in.get();
    }
    ch = in.peek();
  }
  int value = -1;
  in >> value;
  return value;
}

}  // namespace

Image8 read_image8(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  std::string magic;
  in >> magic;
  int channels;
  if (magic == "P6")
    channels = 3;
  else if (magic == "P5")
    channels = 1;
  else
    fail(path, "unsupported format (expected P5/P6), got '" + magic + "'");
  const int w = read_header_int(in);
  const int h = read_header_int(in);
  const int maxval = read_header_int(in);
  if (w <= 0 || h <= 0 || maxval != 255) fail(path, "bad header");
  in.get();  // single whitespace after maxval
  Image8 img;
  img.h = h;
  img.w = w;
  img.channels = channels;
  img.v.resize(static_cast<size_t>(h) * w * channels);
  in.read(reinterpret_cast<char*>(img.v.data()), static_cast<std::streamsize>(img.v.size()));
  if (static_cast<size_t>(in.gcount()) != img.v.size()) fail(path, "truncated pixel data");
  return img;
}

void write_image8(const std::filesystem::path& path, const Image8& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << (img.channels == 3 ? "P6" : "P5") << "\n" << img.w << " " << img.h << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.v.data()),
            static_cast<std::streamsize>(img.v.size()));
  if (!out) fail(path, "write failed");
}

double normalize_u8(uint8_t v) { return 2.0 * v / 255.0 - 1.0; }

uint8_t denormalize_u8(double x) {
  const double v = std::round((x + 1.0) * 255.0 / 2.0);
  return static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
}

Image image_from_8bit(const Image8& img) {
  require(img.channels == 3, "image_from_8bit: 3-channel input required");
  Image out(img.h, img.w);
  for (int r = 0; r < img.h; ++r)
    for (int c = 0; c < img.w; ++c)
      for (int ch = 0; ch < 3; ++ch) out.at(ch, r, c) = normalize_u8(img.at(r, c, ch));
  return out;
}

Image8 image_to_8bit(const Image& img) {
  Image8 out;
  out.h = img.h;
  out.w = img.w;
  out.channels = 3;
  out.v.resize(static_cast<size_t>(img.h) * img.w * 3);
  for (int r = 0; r < img.h; ++r)
    for (int c = 0; c < img.w; ++c)
      for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = denormalize_u8(img.at(ch, r, c));
  return out;
}

Grid mask_from_8bit(const Image8& img) {
  require(img.channels == 1, "mask_from_8bit: single-channel input required");
  Grid out(img.h, img.w);
  for (int r = 0; r < img.h; ++r)
    for (int c = 0; c < img.w; ++c) out.at(r, c) = img.at(r, c, 0) >= 128 ? 1.0 : 0.0;
  return out;
}

Image8 mask_to_8bit(const Grid& mask) {
  Image8 out;
  out.h = mask.h;
  out.w = mask.w;
  out.channels = 1;
  out.v.resize(static_cast<size_t>(mask.h) * mask.w);
  for (int r = 0; r < mask.h; ++r)
    for (int c = 0; c < mask.w; ++c) out.at(r, c, 0) = mask.at(r, c) != 0.0 ? 255 : 0;
  return out;
}

}  // namespace pcgan
