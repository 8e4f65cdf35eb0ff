#include "pcgan/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "pcgan/partition.hpp"
#include "json.hpp"

namespace pcgan {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- crop / pad / resize ------------------------------------------------------

namespace {

// Value of the zero-padded crop at padded-frame coordinates, bilinear.
double sample_padded_bilinear(const Image& image, const BBox& bbox, int pad_top, int pad_left,
                              int ch, double pr, double pc) {
  const auto fetch = [&](int r, int c) -> double {
    const int orig_r = bbox.top + r - pad_top;
    const int orig_c = bbox.left + c - pad_left;
    if (r - pad_top < 0 || r - pad_top >= bbox.height || c - pad_left < 0 ||
        c - pad_left >= bbox.width)
      return 0.0;
    return image.at(ch, orig_r, orig_c);
  };
  const int r0 = static_cast<int>(std::floor(pr));
  const int c0 = static_cast<int>(std::floor(pc));
  const double fr = pr - r0, fc = pc - c0;
  return (1 - fr) * ((1 - fc) * fetch(r0, c0) + fc * fetch(r0, c0 + 1)) +
         fr * ((1 - fc) * fetch(r0 + 1, c0) + fc * fetch(r0 + 1, c0 + 1));
}

}  // namespace

Landmark CropPadResult::map_point(const Landmark& original) const {
  const double pr = original.row - bbox.top + pad_top;
  const double pc = original.col - bbox.left + pad_left;
  return {(pr + 0.5) * target_h / padded_h - 0.5, (pc + 0.5) * target_w / padded_w - 0.5};
}

CropPadResult crop_and_pad(const Image& image, const BBox& bbox, int target_h, int target_w) {
  require(bbox.top >= 0 && bbox.left >= 0 && bbox.top + bbox.height <= image.h &&
              bbox.left + bbox.width <= image.w,
          "crop_and_pad: bbox outside image");
  if (bbox.height <= target_h || bbox.width <= target_w)
    throw SampleRejected("crop_and_pad: bounding box not larger than target size");

  CropPadResult out;
  out.bbox = bbox;
  out.target_h = target_h;
  out.target_w = target_w;
  // Symmetric zero-pad of the short axis up to the target aspect ratio.
  if (static_cast<long>(bbox.height) * target_w >= static_cast<long>(bbox.width) * target_h) {
    out.padded_h = bbox.height;
    out.padded_w = static_cast<int>(
        std::ceil(static_cast<double>(bbox.height) * target_w / target_h));
  } else {
    out.padded_w = bbox.width;
    out.padded_h = static_cast<int>(
        std::ceil(static_cast<double>(bbox.width) * target_h / target_w));
  }
  out.pad_top = (out.padded_h - bbox.height) / 2;
  out.pad_left = (out.padded_w - bbox.width) / 2;

  out.image = Image(target_h, target_w);
  for (int ch = 0; ch < 3; ++ch)
    for (int r = 0; r < target_h; ++r)
      for (int c = 0; c < target_w; ++c) {
        const double pr = (r + 0.5) * out.padded_h / target_h - 0.5;
        const double pc = (c + 0.5) * out.padded_w / target_w - 0.5;
        out.image.at(ch, r, c) =
            sample_padded_bilinear(image, bbox, out.pad_top, out.pad_left, ch, pr, pc);
      }
  return out;
}

Grid crop_and_pad_mask(const Grid& mask, const CropPadResult& ref) {
  Grid out(ref.target_h, ref.target_w, 0.0);
  for (int r = 0; r < ref.target_h; ++r)
    for (int c = 0; c < ref.target_w; ++c) {
      const long pr = std::lround((r + 0.5) * ref.padded_h / ref.target_h - 0.5);
      const long pc = std::lround((c + 0.5) * ref.padded_w / ref.target_w - 0.5);
      const long orig_r = ref.bbox.top + pr - ref.pad_top;
      const long orig_c = ref.bbox.left + pc - ref.pad_left;
      if (pr - ref.pad_top < 0 || pr - ref.pad_top >= ref.bbox.height ||
          pc - ref.pad_left < 0 || pc - ref.pad_left >= ref.bbox.width)
        continue;
      out.at(r, c) = mask.at(static_cast<int>(orig_r), static_cast<int>(orig_c));
    }
  return out;
}

LandmarkSet crop_and_pad_landmarks(const LandmarkSet& landmarks, const CropPadResult& ref) {
  LandmarkSet out;
  out.image_height = ref.target_h;
  out.image_width = ref.target_w;
  for (int j = 0; j < kNumLandmarks; ++j) {
    if (!landmarks.has(j)) continue;
    const Landmark p = ref.map_point(landmarks.at(j));
    if (p.row < 0 || p.row >= ref.target_h || p.col < 0 || p.col >= ref.target_w) continue;
    out.points[j] = p;
  }
  return out;
}

// ---- landmark records ----------------------------------------------------------

std::string landmark_record_to_string(const std::string& id, const LandmarkSet& lm) {
  std::ostringstream os;
  os.precision(17);
  os << id << " " << lm.image_height << " " << lm.image_width;
  for (int j = 0; j < kNumLandmarks; ++j) {
    if (lm.has(j))
      os << " " << lm.at(j).row << "," << lm.at(j).col;
    else
      os << " null";
  }
  return os.str();
}

std::pair<std::string, LandmarkSet> parse_landmark_record(const std::string& line) {
  std::istringstream is(line);
  std::string id;
  LandmarkSet lm;
  if (!(is >> id >> lm.image_height >> lm.image_width))
    throw std::runtime_error("landmark record: bad header in '" + line + "'");
  for (int j = 0; j < kNumLandmarks; ++j) {
    std::string tok;
    if (!(is >> tok))
      throw std::runtime_error("landmark record: expected 18 entries, got " +
                               std::to_string(j));
    if (tok == "null") continue;
    const auto comma = tok.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("landmark record: bad entry '" + tok + "'");
    Landmark p;
    p.row = std::stod(tok.substr(0, comma));
    p.col = std::stod(tok.substr(comma + 1));
    lm.points[j] = p;
  }
  std::string extra;
  if (is >> extra) throw std::runtime_error("landmark record: trailing token '" + extra + "'");
  lm.validate();
  return {id, lm};
}

LandmarkSet read_landmark_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("landmark file: cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  try {
    return parse_landmark_record(line).second;
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_landmark_file(const fs::path& path, const std::string& id, const LandmarkSet& lm) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("landmark file: cannot write " + path.string());
  out << landmark_record_to_string(id, lm) << "\n";
}

// ---- manifest --------------------------------------------------------------------

std::vector<std::string> DatasetManifest::referenced_ids() const {
  std::vector<std::string> ids;
  for (const auto& p : pairs) {
    ids.push_back(p.src_id);
    ids.push_back(p.tgt_id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

DatasetManifest DatasetManifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path.string());
  json j;
  in >> j;
  DatasetManifest m;
  m.root = j.at("root").get<std::string>();
  m.split = j.at("split").get<std::string>();
  m.height = j.at("height").get<int>();
  m.width = j.at("width").get<int>();
  m.identity_disjoint = j.at("identity_disjoint").get<bool>();
  for (const auto& pr : j.at("pairs")) m.pairs.push_back({pr.at(0), pr.at(1)});
  return m;
}

void DatasetManifest::save(const fs::path& path) const {
  json j;
  j["root"] = root.string();
  j["split"] = split;
  j["height"] = height;
  j["width"] = width;
  j["identity_disjoint"] = identity_disjoint;
  j["pairs"] = json::array();
  for (const auto& p : pairs) j["pairs"].push_back({p.src_id, p.tgt_id});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("manifest: cannot write " + path.string());
  out << j.dump(2) << "\n";
}

fs::path image_path(const fs::path& root, const std::string& id) {
  return root / "images" / (id + ".ppm");
}
fs::path mask_path(const fs::path& root, const std::string& id) {
  return root / "masks" / (id + ".pgm");
}
fs::path landmark_path(const fs::path& root, const std::string& id) {
  return root / "landmarks" / (id + ".txt");
}

DatasetManifest scan_dataset(const fs::path& root, const std::string& split, int height,
                             int width) {
  for (const char* dir : {"images", "masks", "landmarks"})
    if (!fs::is_directory(root / dir))
      throw std::runtime_error("dataset: missing directory " + (root / dir).string());
  const fs::path pairs_file = root / "pairs.txt";
  std::ifstream in(pairs_file);
  if (!in) throw std::runtime_error("dataset: missing " + pairs_file.string());

  DatasetManifest m;
  m.root = root;
  m.split = split;
  m.height = height;
  m.width = width;
  std::string src, tgt;
  while (in >> src >> tgt) m.pairs.push_back({src, tgt});
  if (m.pairs.empty()) throw std::runtime_error("dataset: " + pairs_file.string() + " is empty");

  for (const std::string& id : m.referenced_ids())
    for (const fs::path& p :
         {image_path(root, id), mask_path(root, id), landmark_path(root, id)})
      if (!fs::exists(p)) throw std::runtime_error("dataset: missing file " + p.string());
  return m;
}

FilterReport filter_detectable(DatasetManifest& manifest) {
  FilterReport report;
  report.pairs_before = static_cast<int>(manifest.pairs.size());
  std::vector<std::string> bad;
  for (const std::string& id : manifest.referenced_ids()) {
    const LandmarkSet lm = read_landmark_file(landmark_path(manifest.root, id));
    const Grid mask = mask_from_8bit(read_image8(mask_path(manifest.root, id)));
    if (lm.present_count() == 0 || mask.sum() == 0.0) bad.push_back(id);
  }
  std::erase_if(manifest.pairs, [&](const PairRecord& p) {
    return std::find(bad.begin(), bad.end(), p.src_id) != bad.end() ||
           std::find(bad.begin(), bad.end(), p.tgt_id) != bad.end();
  });
  report.dropped_ids = std::move(bad);
  report.pairs_after = static_cast<int>(manifest.pairs.size());
  return report;
}

// ---- paired samples -----------------------------------------------------------------

PairedSample load_pair(const DatasetManifest& manifest, const PairRecord& record) {
  PairedSample s;
  s.src_id = record.src_id;
  s.tgt_id = record.tgt_id;
  s.src_image = image_from_8bit(read_image8(image_path(manifest.root, record.src_id)));
  s.tgt_image = image_from_8bit(read_image8(image_path(manifest.root, record.tgt_id)));
  s.src_mask = mask_from_8bit(read_image8(mask_path(manifest.root, record.src_id)));
  s.tgt_mask = mask_from_8bit(read_image8(mask_path(manifest.root, record.tgt_id)));
  s.src_landmarks = read_landmark_file(landmark_path(manifest.root, record.src_id));
  s.tgt_landmarks = read_landmark_file(landmark_path(manifest.root, record.tgt_id));
  return s;
}

double body_shape_index_or_fallback(const LandmarkSet& lm) {
  try {
    return body_shape_index(lm);
  } catch (const MissingTorsoError&) {
    return lm.image_height / 4.0;
  }
}

PreparedSample prepare_sample(const std::string& id, const Image& image,
                              const LandmarkSet& landmarks, const Grid& body, double sigma,
                              bool squared_distance) {
  PreparedSample s;
  s.id = id;
  s.image = image;
  s.landmarks = landmarks;
  s.body = body;
  s.d_s = body_shape_index_or_fallback(landmarks);
  s.heat = heatmaps_from_landmarks(landmarks, sigma, squared_distance);
  const RegionMaskSet regions = build_region_masks(landmarks, s.d_s, image.h, image.w);
  s.refined = refine_part_masks(body, regions);
  return s;
}

namespace {

constexpr char kCacheMagic[8] = {'P', 'C', 'G', 'A', 'N', 'P', 'S', '1'};

void write_grid(std::ostream& out, const Grid& g) {
  const int32_t h = g.h, w = g.w;
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  out.write(reinterpret_cast<const char*>(&w), sizeof(w));
  out.write(reinterpret_cast<const char*>(g.v.data()),
            static_cast<std::streamsize>(g.v.size() * sizeof(double)));
}

void read_dims(std::istream& in, int& h, int& w) {
  int32_t h32 = 0, w32 = 0;
  in.read(reinterpret_cast<char*>(&h32), sizeof(h32));
  in.read(reinterpret_cast<char*>(&w32), sizeof(w32));
  if (!in || h32 <= 0 || w32 <= 0) throw std::runtime_error("prepared cache: bad dimensions");
  h = h32;
  w = w32;
}

Grid read_grid(std::istream& in) {
  int h = 0, w = 0;
  read_dims(in, h, w);
  Grid g(h, w);
  in.read(reinterpret_cast<char*>(g.v.data()),
          static_cast<std::streamsize>(g.v.size() * sizeof(double)));
  return g;
}

}  // namespace

void write_prepared_cache(const fs::path& path, const PreparedSample& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("prepared cache: cannot write " + path.string());
  out.write(kCacheMagic, sizeof(kCacheMagic));
  const int32_t id_len = static_cast<int32_t>(s.id.size());
  out.write(reinterpret_cast<const char*>(&id_len), sizeof(id_len));
  out.write(s.id.data(), id_len);
  const int32_t h = s.image.h, w = s.image.w;
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  out.write(reinterpret_cast<const char*>(&w), sizeof(w));
  out.write(reinterpret_cast<const char*>(&s.d_s), sizeof(s.d_s));
  out.write(reinterpret_cast<const char*>(s.image.v.data()),
            static_cast<std::streamsize>(s.image.v.size() * sizeof(double)));
  for (int j = 0; j < kNumLandmarks; ++j) {
    const uint8_t present = s.landmarks.has(j) ? 1 : 0;
    out.write(reinterpret_cast<const char*>(&present), sizeof(present));
    const Landmark p = present ? s.landmarks.at(j) : Landmark{0, 0};
    out.write(reinterpret_cast<const char*>(&p.row), sizeof(p.row));
    out.write(reinterpret_cast<const char*>(&p.col), sizeof(p.col));
  }
  write_grid(out, s.body);
  for (int j = 0; j < kNumLandmarks; ++j) write_grid(out, s.heat.channels[j]);
  for (int i = 0; i < kNumParts; ++i) write_grid(out, s.refined[i]);
  if (!out) throw std::runtime_error("prepared cache: write failed for " + path.string());
}

PreparedSample read_prepared_cache(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("prepared cache: cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0)
    throw std::runtime_error("prepared cache: bad magic in " + path.string());
  int32_t id_len = 0;
  in.read(reinterpret_cast<char*>(&id_len), sizeof(id_len));
  if (!in || id_len < 0 || id_len > 4096)
    throw std::runtime_error("prepared cache: bad id length in " + path.string());
  PreparedSample s;
  s.id.resize(id_len);
  in.read(s.id.data(), id_len);
  int32_t h = 0, w = 0;
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  in.read(reinterpret_cast<char*>(&w), sizeof(w));
  if (!in || h <= 0 || w <= 0) throw std::runtime_error("prepared cache: bad dimensions");
  in.read(reinterpret_cast<char*>(&s.d_s), sizeof(s.d_s));
  s.image = Image(h, w);
  in.read(reinterpret_cast<char*>(s.image.v.data()),
          static_cast<std::streamsize>(s.image.v.size() * sizeof(double)));
  s.landmarks.image_height = h;
  s.landmarks.image_width = w;
  for (int j = 0; j < kNumLandmarks; ++j) {
    uint8_t present = 0;
    in.read(reinterpret_cast<char*>(&present), sizeof(present));
    Landmark p{0, 0};
    in.read(reinterpret_cast<char*>(&p.row), sizeof(p.row));
    in.read(reinterpret_cast<char*>(&p.col), sizeof(p.col));
    if (present) s.landmarks.points[j] = p;
  }
  s.body = read_grid(in);
  s.heat.h = h;
  s.heat.w = w;
  for (int j = 0; j < kNumLandmarks; ++j) s.heat.channels[j] = read_grid(in);
  for (int i = 0; i < kNumParts; ++i) s.refined[i] = read_grid(in);
  if (!in) throw std::runtime_error("prepared cache: truncated file " + path.string());
  return s;
}

PairedDataset PairedDataset::load(const DatasetManifest& manifest, double sigma,
                                  bool squared_distance) {
  PairedDataset ds;
  ds.height_ = manifest.height;
  ds.width_ = manifest.width;
  ds.pairs_ = manifest.pairs;
  for (const std::string& id : manifest.referenced_ids()) {
    const Image image = image_from_8bit(read_image8(image_path(manifest.root, id)));
    require(image.h == manifest.height && image.w == manifest.width,
            "dataset: image resolution does not match manifest");
    const Grid body = mask_from_8bit(read_image8(mask_path(manifest.root, id)));
    const LandmarkSet lm = read_landmark_file(landmark_path(manifest.root, id));
    ds.samples_.emplace(id, prepare_sample(id, image, lm, body, sigma, squared_distance));
  }
  return ds;
}

PairedDataset PairedDataset::load_cached(const DatasetManifest& manifest,
                                         const fs::path& cache_dir) {
  PairedDataset ds;
  ds.height_ = manifest.height;
  ds.width_ = manifest.width;
  ds.pairs_ = manifest.pairs;
  for (const std::string& id : manifest.referenced_ids()) {
    PreparedSample s = read_prepared_cache(cache_dir / (id + ".bin"));
    require(s.id == id, "prepared cache: id mismatch");
    require(s.image.h == manifest.height && s.image.w == manifest.width,
            "dataset: cached resolution does not match manifest");
    ds.samples_.emplace(id, std::move(s));
  }
  return ds;
}

const PreparedSample& PairedDataset::sample(const std::string& id) const {
  const auto it = samples_.find(id);
  if (it == samples_.end()) throw std::runtime_error("dataset: unknown sample id " + id);
  return it->second;
}

// ---- synthetic stick figures -----------------------------------------------------------

namespace {

struct Color {
  uint8_t r, g, b;
};

void put_pixel(Image8& img, Grid& mask, int r, int c, Color col) {
  if (r < 0 || r >= img.h || c < 0 || c >= img.w) return;
  img.at(r, c, 0) = col.r;
  img.at(r, c, 1) = col.g;
  img.at(r, c, 2) = col.b;
  mask.at(r, c) = 1.0;
}

void draw_thick_segment(Image8& img, Grid& mask, Landmark a, Landmark b, double thickness,
                        Color col) {
  const int r0 = std::max(0, static_cast<int>(std::floor(std::min(a.row, b.row) - thickness)));
  const int r1 = std::min(img.h - 1, static_cast<int>(std::ceil(std::max(a.row, b.row) + thickness)));
  const int c0 = std::max(0, static_cast<int>(std::floor(std::min(a.col, b.col) - thickness)));
  const int c1 = std::min(img.w - 1, static_cast<int>(std::ceil(std::max(a.col, b.col) + thickness)));
  const double dr = b.row - a.row, dc = b.col - a.col;
  const double len2 = dr * dr + dc * dc;
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      double t = 0.0;
      if (len2 > 0) t = std::clamp(((r - a.row) * dr + (c - a.col) * dc) / len2, 0.0, 1.0);
      const double d = std::hypot(r - (a.row + t * dr), c - (a.col + t * dc));
      if (d <= thickness) put_pixel(img, mask, r, c, col);
    }
}

void draw_disk(Image8& img, Grid& mask, Landmark center, double radius, Color col) {
  for (int r = static_cast<int>(center.row - radius); r <= center.row + radius; ++r)
    for (int c = static_cast<int>(center.col - radius); c <= center.col + radius; ++c)
      if (std::hypot(r - center.row, c - center.col) <= radius) put_pixel(img, mask, r, c, col);
}

}  // namespace

void write_synthetic_dataset(const fs::path& root, const SyntheticSpec& spec) {
  fs::create_directories(root / "images");
  fs::create_directories(root / "masks");
  fs::create_directories(root / "landmarks");
  std::ofstream pairs(root / "pairs.txt");
  if (!pairs) throw std::runtime_error("synthetic: cannot write pairs.txt");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double h = spec.height, w = spec.width;

  // Base skeleton as (row, col) fractions of the frame.
  const std::array<Landmark, kNumLandmarks> base = {{
      {0.10, 0.50}, {0.20, 0.50}, {0.22, 0.38}, {0.33, 0.32}, {0.44, 0.28},
      {0.22, 0.62}, {0.33, 0.68}, {0.44, 0.72}, {0.50, 0.42}, {0.65, 0.40},
      {0.80, 0.38}, {0.50, 0.58}, {0.65, 0.60}, {0.80, 0.62}, {0.08, 0.46},
      {0.08, 0.54}, {0.10, 0.42}, {0.10, 0.58},
  }};

  for (int id = 0; id < spec.ids; ++id) {
    const Color shirt = {static_cast<uint8_t>(120 + 40 * (id % 3)),
                         static_cast<uint8_t>(40 + 60 * ((id + 1) % 3)), 200};
    const Color pants = {50, static_cast<uint8_t>(90 + 50 * (id % 2)),
                         static_cast<uint8_t>(60 + 30 * (id % 4))};
    const Color skin = {230, 190, 160};

    for (int pose = 0; pose < spec.poses_per_id; ++pose) {
      LandmarkSet lm;
      lm.image_height = spec.height;
      lm.image_width = spec.width;
      const double shift = 0.08 * uni(rng);
      for (int j = 0; j < kNumLandmarks; ++j) {
        double row = (base[j].row + 0.02 * uni(rng)) * h;
        double col = (base[j].col + shift + 0.03 * uni(rng)) * w;
        row = std::clamp(row, 0.0, h - 1.0);
        col = std::clamp(col, 0.0, w - 1.0);
        lm.points[j] = Landmark{std::round(row), std::round(col)};
      }

      Image8 img;
      img.h = spec.height;
      img.w = spec.width;
      img.channels = 3;
      img.v.resize(static_cast<size_t>(spec.height) * spec.width * 3);
      // Pose-dependent background gradient with a vertical stripe.
      const int stripe = 5 + (pose * 17) % std::max(1, spec.width - 14);
      for (int r = 0; r < spec.height; ++r)
        for (int c = 0; c < spec.width; ++c) {
          const uint8_t g = static_cast<uint8_t>(40 + 140.0 * r / spec.height);
          const bool in_stripe = c >= stripe && c < stripe + 7;
          img.at(r, c, 0) = in_stripe ? 200 : g;
          img.at(r, c, 1) = static_cast<uint8_t>(60 + 20 * pose);
          img.at(r, c, 2) = in_stripe ? 80 : static_cast<uint8_t>(255 - g);
        }
      Grid mask(spec.height, spec.width, 0.0);

      const double d_s = body_shape_index_or_fallback(lm);
      const double limb = std::max(1.5, 0.10 * d_s);
      // Torso block between shoulders and hips.
      draw_thick_segment(img, mask,
                         {(lm.at(kRShoulder).row + lm.at(kLShoulder).row) / 2,
                          (lm.at(kRShoulder).col + lm.at(kLShoulder).col) / 2},
                         {(lm.at(kRHip).row + lm.at(kLHip).row) / 2,
                          (lm.at(kRHip).col + lm.at(kLHip).col) / 2},
                         0.45 * d_s, shirt);
      const std::array<std::array<int, 2>, 8> limbs = {{{kRShoulder, kRElbow},
                                                        {kRElbow, kRWrist},
                                                        {kLShoulder, kLElbow},
                                                        {kLElbow, kLWrist},
                                                        {kRHip, kRKnee},
                                                        {kRKnee, kRAnkle},
                                                        {kLHip, kLKnee},
                                                        {kLKnee, kLAnkle}}};
      for (size_t i = 0; i < limbs.size(); ++i)
        draw_thick_segment(img, mask, lm.at(limbs[i][0]), lm.at(limbs[i][1]), limb,
                           i < 4 ? shirt : pants);
      draw_thick_segment(img, mask, lm.at(kNose), lm.at(kNeck), limb, skin);
      draw_disk(img, mask, lm.at(kNose), 0.30 * d_s, skin);

      const std::string sample_id = "id" + std::to_string(id) + "_p" + std::to_string(pose);
      write_image8(image_path(root, sample_id), img);
      write_image8(mask_path(root, sample_id), mask_to_8bit(mask));
      write_landmark_file(landmark_path(root, sample_id), sample_id, lm);
    }
    // Both orientations of every intra-identity pair.
    for (int a = 0; a < spec.poses_per_id; ++a)
      for (int b = 0; b < spec.poses_per_id; ++b)
        if (a != b)
          pairs << "id" << id << "_p" << a << " id" << id << "_p" << b << "\n";
  }
}

}  // namespace pcgan
