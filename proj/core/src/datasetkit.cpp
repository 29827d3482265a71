#include "reefforge/datasetkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "reefforge/errors.hpp"
#include "reefforge/fsio.hpp"
#include "reefforge/version.hpp"

namespace reefforge::datasetkit {

using nlohmann::json;

void validate_box(const BoundingBox& box, double eps) {
  if (box.class_id < 0) throw ValidationError("box: class_id must be >= 0");
  if (box.cx < -eps || box.cx > 1 + eps || box.cy < -eps || box.cy > 1 + eps)
    throw ValidationError("box: center outside [0,1]");
  if (box.w <= 0 || box.w > 1 + eps || box.h <= 0 || box.h > 1 + eps)
    throw ValidationError("box: size must be in (0,1]");
  if (box.cx - box.w / 2 < -eps || box.cx + box.w / 2 > 1 + eps ||
      box.cy - box.h / 2 < -eps || box.cy + box.h / 2 > 1 + eps)
    throw ValidationError("box: extends outside the image");
}

void validate_entry(const LabeledImage& entry) {
  if (entry.width <= 0 || entry.height <= 0)
    throw ValidationError("entry: image dimensions must be positive");
  if (entry.source == Source::synthetic && entry.scene_ref.empty())
    throw ValidationError("entry: synthetic images must carry a scene_ref");
  for (const auto& b : entry.boxes) validate_box(b, 2e-6);
}

void validate_manifest(const DatasetManifest& manifest) {
  for (const auto& e : manifest.entries) {
    validate_entry(e.image);
    if (e.split == Split::test && e.image.source != Source::real)
      throw ValidationError("manifest: test split must contain only real entries");
  }
  if (manifest.real_train_frac < 0 || manifest.real_train_frac > 1)
    throw ValidationError("manifest: real_train_frac must be in [0,1]");
}

std::vector<BoundingBox> mask_to_boxes(const rasterizer::InstanceMask& mask,
                                       size_t min_pixels) {
  struct Extent {
    int min_x, min_y, max_x, max_y;
    size_t count = 0;
  };
  std::map<uint32_t, Extent> extents;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      uint32_t id = mask.at(x, y);
      if (id == 0) continue;
      auto [it, fresh] = extents.try_emplace(id, Extent{x, y, x, y, 0});
      Extent& e = it->second;
      if (!fresh) {
        e.min_x = std::min(e.min_x, x);
        e.min_y = std::min(e.min_y, y);
        e.max_x = std::max(e.max_x, x);
        e.max_y = std::max(e.max_y, y);
      }
      ++e.count;
    }
  }
  std::vector<BoundingBox> boxes;
  for (const auto& [id, e] : extents) {
    if (e.count < min_pixels) continue;
    BoundingBox b;
    b.class_id = 0;
    b.cx = static_cast<double>(e.min_x + e.max_x + 1) / (2.0 * mask.width);
    b.cy = static_cast<double>(e.min_y + e.max_y + 1) / (2.0 * mask.height);
    b.w = static_cast<double>(e.max_x - e.min_x + 1) / mask.width;
    b.h = static_cast<double>(e.max_y - e.min_y + 1) / mask.height;
    boxes.push_back(b);
  }
  return boxes;
}

std::filesystem::path write_yolo_labels(const LabeledImage& entry,
                                        const std::filesystem::path& dir) {
  for (const auto& b : entry.boxes) validate_box(b, 1e-9);
  ensure_directory(dir);
  std::string text;
  char line[128];
  for (const auto& b : entry.boxes) {
    std::snprintf(line, sizeof line, "%d %.6f %.6f %.6f %.6f\n", b.class_id, b.cx, b.cy, b.w,
                  b.h);
    text += line;
  }
  std::filesystem::path out =
      dir / (std::filesystem::path(entry.image_path).stem().string() + ".txt");
  write_text_file_atomic(out, text);
  return out;
}

std::vector<BoundingBox> read_yolo_labels(const std::filesystem::path& path, int width,
                                          int height) {
  if (width <= 0 || height <= 0)
    throw ValidationError("read_yolo_labels: image dimensions must be positive");
  std::istringstream in(read_text_file(path));
  std::vector<BoundingBox> boxes;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    BoundingBox b;
    std::string extra;
    if (!(ls >> b.class_id >> b.cx >> b.cy >> b.w >> b.h) || (ls >> extra)) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected `class cx cy w h`");
    }
    try {
      validate_box(b, 2e-6);  // slack for the 6-decimal quantization
    } catch (const ValidationError& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    boxes.push_back(b);
  }
  return boxes;
}

DatasetManifest mix_split(const std::vector<LabeledImage>& real,
                          const std::vector<LabeledImage>& synthetic,
                          double real_train_frac, uint64_t seed) {
  if (real_train_frac < 0 || real_train_frac > 1)
    throw ValidationError("mix_split: real_train_frac must be in [0,1]");
  for (const auto& e : real)
    if (e.source != Source::real) throw ValidationError("mix_split: real list contaminated");
  for (const auto& e : synthetic)
    if (e.source != Source::synthetic)
      throw ValidationError("mix_split: synthetic list contaminated");

  // floor with a 1e-9 nudge so exact fractions (0.7*10) stay at their
  // mathematical value under binary floating point
  size_t n_train_real = static_cast<size_t>(
      std::floor(real_train_frac * static_cast<double>(real.size()) + 1e-9));

  std::vector<size_t> order(real.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  DatasetManifest manifest;
  manifest.seed = seed;
  manifest.real_train_frac = real_train_frac;
  manifest.tool_version = kToolVersion;
  manifest.entries.reserve(real.size() + synthetic.size());
  for (size_t i = 0; i < order.size(); ++i) {
    Split split = (i < n_train_real) ? Split::train : Split::test;
    manifest.entries.push_back({real[order[i]], split});
  }
  for (const auto& s : synthetic) manifest.entries.push_back({s, Split::train});
  validate_manifest(manifest);
  return manifest;
}

void emit_training_config(const DatasetManifest& manifest,
                          const std::filesystem::path& manifest_path,
                          const std::filesystem::path& out_path) {
  validate_manifest(manifest);
  KVConfig cfg;
  cfg.set("epochs", "300");
  cfg.set("lr0", "0.01");
  cfg.set("scheduler", "cosine");
  cfg.set("optimizer", "adam");
  cfg.set("momentum", "0.937");
  cfg.set("weight_decay", "0.0005");
  cfg.set("batch", "16");
  cfg.set("imgsz", "640");
  cfg.set("close_mosaic", "10");
  cfg.set("mosaic", "1.0");
  cfg.set("augment", "randaugment");
  cfg.set("erasing", "0.4");
  cfg.set("val_iou", "0.7");
  cfg.set("max_det", "300");
  cfg.set("nc", "1");
  cfg.set("names", "oyster");
  cfg.set("train_manifest", manifest_path.string());
  cfg.save(out_path);
}

namespace {

json entry_to_json(const ManifestEntry& e) {
  json boxes = json::array();
  for (const auto& b : e.image.boxes)
    boxes.push_back(json::array({b.class_id, b.cx, b.cy, b.w, b.h}));
  json j{{"image_path", e.image.image_path},
         {"width", e.image.width},
         {"height", e.image.height},
         {"boxes", boxes},
         {"source", e.image.source == Source::real ? "real" : "synthetic"},
         {"split", e.split == Split::train ? "train" : "test"}};
  if (!e.image.scene_ref.empty()) j["scene_ref"] = e.image.scene_ref;
  return j;
}

ManifestEntry entry_from_json(const json& j) {
  ManifestEntry e;
  e.image.image_path = j.at("image_path");
  e.image.width = j.at("width");
  e.image.height = j.at("height");
  for (const auto& b : j.at("boxes")) {
    if (!b.is_array() || b.size() != 5)
      throw ParseError("manifest: box must be [class, cx, cy, w, h]");
    e.image.boxes.push_back({b[0].get<int>(), b[1].get<double>(), b[2].get<double>(),
                             b[3].get<double>(), b[4].get<double>()});
  }
  std::string source = j.at("source");
  if (source == "real")
    e.image.source = Source::real;
  else if (source == "synthetic")
    e.image.source = Source::synthetic;
  else
    throw ParseError("manifest: unknown source `" + source + "`");
  std::string split = j.at("split");
  if (split == "train")
    e.split = Split::train;
  else if (split == "test")
    e.split = Split::test;
  else
    throw ParseError("manifest: unknown split `" + split + "`");
  e.image.scene_ref = j.value("scene_ref", "");
  return e;
}

}  // namespace

std::string manifest_to_json(const DatasetManifest& manifest) {
  json entries = json::array();
  for (const auto& e : manifest.entries) entries.push_back(entry_to_json(e));
  json j{{"schema", "reefforge.manifest/1"},
         {"tool_version", manifest.tool_version},
         {"seed", manifest.seed},
         {"real_train_frac", manifest.real_train_frac},
         {"rng", {{"name", manifest.rng.name}, {"version", manifest.rng.version}}},
         {"config_echo", manifest.config_echo.serialize()},
         {"entries", entries}};
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest json: ") + e.what());
  }
  try {
    DatasetManifest m;
    m.tool_version = j.value("tool_version", "");
    m.seed = j.at("seed");
    m.real_train_frac = j.at("real_train_frac");
    if (j.contains("rng")) {
      m.rng.name = j["rng"].value("name", "");
      m.rng.version = j["rng"].value("version", 0);
    }
    m.config_echo = KVConfig::parse(j.value("config_echo", ""));
    for (const auto& e : j.at("entries")) m.entries.push_back(entry_from_json(e));
    validate_manifest(m);
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest json: ") + e.what());
  }
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  write_text_file_atomic(path, manifest_to_json(manifest));
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(read_text_file(path));
}

}  // namespace reefforge::datasetkit
