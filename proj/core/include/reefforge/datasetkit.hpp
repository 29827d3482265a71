#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "reefforge/config.hpp"
#include "reefforge/rasterizer.hpp"
#include "reefforge/rng.hpp"

namespace reefforge::datasetkit {

// Normalized YOLO-style box: center + size in [0,1] image fractions.
struct BoundingBox {
  int class_id = 0;  // 0 = oyster
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
};

// eps absorbs quantization from the 6-decimal label files
void validate_box(const BoundingBox& box, double eps = 1e-9);

enum class Source { real, synthetic };
enum class Split { train, test };

struct LabeledImage {
  std::string image_path;
  int width = 0;
  int height = 0;
  std::vector<BoundingBox> boxes;
  Source source = Source::real;
  std::string scene_ref;  // required when source == synthetic
};

void validate_entry(const LabeledImage& entry);

struct ManifestEntry {
  LabeledImage image;
  Split split = Split::train;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  uint64_t seed = 0;
  double real_train_frac = 0.30;
  KVConfig config_echo;
  std::string tool_version;
  RngId rng;
};

// test split must be all-real; synthetic entries carry scene_refs
void validate_manifest(const DatasetManifest& manifest);

/// Tight axis-aligned boxes of each instance id present in the mask, using
/// the pixel-edge convention: for inclusive pixel bounds [x_min, x_max],
/// cx = (x_min + x_max + 1) / (2*width) and w = (x_max - x_min + 1) / width.
/// Instances with fewer than min_pixels visible pixels are dropped (heavily
/// occluded shells are left unlabeled). Output ordered by instance id.
std::vector<BoundingBox> mask_to_boxes(const rasterizer::InstanceMask& mask,
                                       size_t min_pixels = 25);

/// One `class cx cy w h` line per box, 6 decimal places, LF endings; the file
/// is named after the image stem. Returns the label path.
std::filesystem::path write_yolo_labels(const LabeledImage& entry,
                                        const std::filesystem::path& dir);

/// Exact inverse of write_yolo_labels up to the 1e-6 quantization. Malformed
/// lines (field count, non-numeric, out-of-range) raise a parse error naming
/// the line number.
std::vector<BoundingBox> read_yolo_labels(const std::filesystem::path& path, int width,
                                          int height);

/// The paper's mixing protocol: floor(real_train_frac * |real|) real entries
/// (seeded shuffle) plus every synthetic entry go to train; the remaining
/// real entries are the test split. Test therefore stays all-real.
DatasetManifest mix_split(const std::vector<LabeledImage>& real,
                          const std::vector<LabeledImage>& synthetic,
                          double real_train_frac, uint64_t seed);

/// Flat `key: value` trainer configuration carrying the published
/// hyperparameters (epochs, lr0, scheduler, momentum, weight decay, batch,
/// image size, mosaic schedule, augmentation, validation IoU, detection cap)
/// plus dataset paths.
void emit_training_config(const DatasetManifest& manifest,
                          const std::filesystem::path& manifest_path,
                          const std::filesystem::path& out_path);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace reefforge::datasetkit
