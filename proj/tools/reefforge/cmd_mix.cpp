#include <cstdio>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "reefforge/datasetkit.hpp"
#include "reefforge/fsio.hpp"
#include "reefforge/png_io.hpp"

namespace reefforge::cli {

namespace fs = std::filesystem;
using datasetkit::LabeledImage;
using datasetkit::Source;

namespace {

// image + label pairs from a directory of PNGs (sizes probed from the files)
std::vector<LabeledImage> ingest_real(const fs::path& images_dir, const fs::path& labels_dir) {
  if (!fs::is_directory(images_dir))
    throw ValidationError("mix: real images directory not found: " + images_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(images_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".png")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<LabeledImage> out;
  for (const auto& img : files) {
    LabeledImage e;
    e.image_path = img.string();
    PngInfo info = probe_png(read_binary_file(img));
    e.width = info.width;
    e.height = info.height;
    e.source = Source::real;
    fs::path label = labels_dir / (img.stem().string() + ".txt");
    if (fs::exists(label))
      e.boxes = datasetkit::read_yolo_labels(label, e.width, e.height);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<LabeledImage> ingest_synth(const fs::path& synth_dir) {
  fs::path manifest_path = synth_dir / "manifest.json";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  std::vector<LabeledImage> out;
  try {
    for (const auto& entry : j.at("entries")) {
      LabeledImage e;
      e.image_path = entry.at("image");
      e.width = entry.at("width");
      e.height = entry.at("height");
      e.source = Source::synthetic;
      e.scene_ref = entry.at("scene_ref");
      for (const auto& b : entry.at("boxes"))
        e.boxes.push_back({b.at(0).get<int>(), b.at(1).get<double>(), b.at(2).get<double>(),
                           b.at(3).get<double>(), b.at(4).get<double>()});
      out.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace

int run_mix(const PipelineConfig& cfg, const fs::path& real_images,
            const fs::path& real_labels, const fs::path& synth_dir) {
  std::vector<LabeledImage> real;
  if (!real_images.empty()) real = ingest_real(real_images, real_labels);
  std::vector<LabeledImage> synth;
  if (!synth_dir.empty()) synth = ingest_synth(synth_dir);

  auto manifest = datasetkit::mix_split(real, synth, cfg.real_train_frac, cfg.seed);
  manifest.config_echo = cfg.echo();

  ensure_directory(cfg.out_dir);
  fs::path manifest_path = cfg.out_dir / "manifest.json";
  datasetkit::save_manifest(manifest, manifest_path);
  datasetkit::emit_training_config(manifest, manifest_path,
                                   cfg.out_dir / "trainer_config.yaml");

  size_t train = 0, test = 0;
  for (const auto& e : manifest.entries)
    (e.split == datasetkit::Split::train ? train : test)++;
  std::fprintf(stderr, "[mix] %zu real + %zu synthetic -> %zu train / %zu test\n",
               real.size(), synth.size(), train, test);
  return 0;
}

}  // namespace reefforge::cli
