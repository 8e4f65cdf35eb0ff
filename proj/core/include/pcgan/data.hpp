#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcgan/geometry.hpp"
#include "pcgan/grid.hpp"
#include "pcgan/image_io.hpp"

namespace pcgan {

struct BBox {
  int top = 0, left = 0, height = 0, width = 0;
};

/// Raised when a bounding box is below the minimum generation size.
struct SampleRejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Crop + symmetric zero-pad to the target aspect ratio + bilinear resize.
/// map_point carries landmark/mask coordinates through the same transform.
struct CropPadResult {
  Image image;
  BBox bbox;
  int pad_top = 0, pad_left = 0;
  int padded_h = 0, padded_w = 0;
  int target_h = 0, target_w = 0;

  Landmark map_point(const Landmark& original) const;
};

CropPadResult crop_and_pad(const Image& image, const BBox& bbox, int target_h = 128,
                           int target_w = 64);
/// Same coordinate map, nearest-neighbor sampling to keep the mask binary.
Grid crop_and_pad_mask(const Grid& mask, const CropPadResult& ref);
/// Transformed landmarks; points falling outside the output frame become MISSING.
LandmarkSet crop_and_pad_landmarks(const LandmarkSet& landmarks, const CropPadResult& ref);

// ---- landmark text records -------------------------------------------------
// One line per image: <id> <height> <width> then 18 entries "row,col" or "null".

std::string landmark_record_to_string(const std::string& id, const LandmarkSet& lm);
std::pair<std::string, LandmarkSet> parse_landmark_record(const std::string& line);
LandmarkSet read_landmark_file(const std::filesystem::path& path);
void write_landmark_file(const std::filesystem::path& path, const std::string& id,
                         const LandmarkSet& lm);

// ---- dataset layout ---------------------------------------------------------
// root/images/<id>.ppm, root/masks/<id>.pgm, root/landmarks/<id>.txt, root/pairs.txt

struct PairRecord {
  std::string src_id, tgt_id;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::string split = "train";
  int height = 0, width = 0;
  bool identity_disjoint = true;
  std::vector<PairRecord> pairs;

  std::vector<std::string> referenced_ids() const;
  static DatasetManifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

std::filesystem::path image_path(const std::filesystem::path& root, const std::string& id);
std::filesystem::path mask_path(const std::filesystem::path& root, const std::string& id);
std::filesystem::path landmark_path(const std::filesystem::path& root, const std::string& id);

/// Scans a raw dataset directory (pairs.txt + per-id files) into a manifest.
/// Throws std::runtime_error naming any missing piece.
DatasetManifest scan_dataset(const std::filesystem::path& root, const std::string& split,
                             int height, int width);

struct FilterReport {
  std::vector<std::string> dropped_ids;
  int pairs_before = 0;
  int pairs_after = 0;
};

/// Drops records whose landmark set is empty or whose mask has no person
/// pixels, and every pair touching them.
FilterReport filter_detectable(DatasetManifest& manifest);

// ---- paired samples ----------------------------------------------------------

struct PairedSample {
  std::string src_id, tgt_id;
  Image src_image, tgt_image;
  LandmarkSet src_landmarks, tgt_landmarks;
  Grid src_mask, tgt_mask;
};

/// Loads and normalizes one pair; errors name the offending path.
PairedSample load_pair(const DatasetManifest& manifest, const PairRecord& record);

/// Body-shape index with the documented fallback (image_height / 4) when the
/// torso landmarks are incomplete.
double body_shape_index_or_fallback(const LandmarkSet& lm);

/// Fully preprocessed image record: normalized image, heat maps, body mask,
/// refined part masks and body-shape index.
struct PreparedSample {
  std::string id;
  Image image;
  LandmarkSet landmarks;
  Grid body;
  HeatMapStack heat;
  std::array<Grid, kNumParts> refined;
  double d_s = 0;
};

PreparedSample prepare_sample(const std::string& id, const Image& image,
                              const LandmarkSet& landmarks, const Grid& body, double sigma,
                              bool squared_distance = false);

// ---- prepared-sample cache ----------------------------------------------------
// Binary container for a fully preprocessed record; round-trips bitwise.

void write_prepared_cache(const std::filesystem::path& path, const PreparedSample& s);
PreparedSample read_prepared_cache(const std::filesystem::path& path);

/// In-memory dataset keyed by id plus the pair list; desk-scale sizes only.
class PairedDataset {
 public:
  static PairedDataset load(const DatasetManifest& manifest, double sigma,
                            bool squared_distance = false);
  /// Loads from <cache_dir>/<id>.bin files written by write_prepared_cache.
  static PairedDataset load_cached(const DatasetManifest& manifest,
                                   const std::filesystem::path& cache_dir);

  const PreparedSample& sample(const std::string& id) const;
  const std::vector<PairRecord>& pairs() const { return pairs_; }
  int height() const { return height_; }
  int width() const { return width_; }
  size_t num_samples() const { return samples_.size(); }

 private:
  std::map<std::string, PreparedSample> samples_;
  std::vector<PairRecord> pairs_;
  int height_ = 0, width_ = 0;
};

// ---- synthetic stick-figure dataset -------------------------------------------

struct SyntheticSpec {
  int ids = 2;
  int poses_per_id = 2;
  int height = 128;
  int width = 64;
  uint64_t seed = 7;
};

/// Writes a hermetic stick-figure dataset (images + exact landmarks + exact
/// masks + pairs.txt) under root.
void write_synthetic_dataset(const std::filesystem::path& root, const SyntheticSpec& spec);

}  // namespace pcgan
