#include <cstdio>
#include <memory>
#include <mutex>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "reefforge/datasetkit.hpp"
#include "reefforge/fsio.hpp"
#include "reefforge/png_io.hpp"
#include "reefforge/rng.hpp"
#include "reefforge/version.hpp"

namespace reefforge::cli {

namespace fs = std::filesystem;

int run_synth(const PipelineConfig& cfg, const fs::path& scenes_dir) {
  if (!fs::is_directory(scenes_dir))
    throw ValidationError("synth: scenes directory not found: " + scenes_dir.string());

  std::vector<fs::path> scene_files;
  for (const auto& entry : fs::directory_iterator(scenes_dir)) {
    const auto& p = entry.path();
    if (p.extension() == ".json" && p.filename().string().rfind("scene_", 0) == 0)
      scene_files.push_back(p);
  }
  std::sort(scene_files.begin(), scene_files.end());
  if (scene_files.empty())
    throw ValidationError("synth: no scene_*.json files in " + scenes_dir.string());

  std::vector<std::vector<uint8_t>> pool;
  std::string pool_provenance;
  if (!cfg.mock && cfg.backend_url.empty())
    throw TransportError(
        "synth: no backend configured (set --backend, REEFFORGE_BACKEND_URL, or --mock)");

  if (cfg.real_pool_dir.empty()) {
    if (!cfg.mock)
      throw ValidationError("synth: a real backend run requires --real-pool");
    pool = builtin_reference_pool();
    pool_provenance = "builtin";
  } else {
    pool = load_pool_dir(cfg.real_pool_dir);
    pool_provenance = cfg.real_pool_dir.string();
  }
  if (pool.size() < 4)
    throw ValidationError("synth: reference pool must hold at least 4 images");

  ensure_directory(cfg.out_dir / "images");
  ensure_directory(cfg.out_dir / "labels");

  std::unique_ptr<synthclient::SynthesisBackend> backend;
  if (cfg.mock)
    backend = std::make_unique<synthclient::MockBackend>();
  else
    backend = std::make_unique<synthclient::HttpBackend>(cfg.backend_url);

  struct SceneResult {
    nlohmann::json entry;
    std::string failure;
  };
  std::vector<SceneResult> results(scene_files.size());
  std::mutex fail_mutex;
  bool aborted = false;

  parallel_for(scene_files.size(), std::max(1, cfg.concurrency), [&](size_t i) {
    {
      std::lock_guard<std::mutex> lock(fail_mutex);
      if (aborted) return;
    }
    const fs::path& scene_path = scene_files[i];
    const std::string scene_id = scene_path.stem().string();
    try {
      auto doc = scenegen::scene_from_json(read_text_file(scene_path));
      auto depth_png = read_binary_file(scenes_dir / (scene_id + "_depth.png"));
      auto mask_png = read_binary_file(scenes_dir / (scene_id + "_mask.png"));

      auto request = synthclient::build_request(std::move(depth_png), mask_png, scene_id,
                                                pool, cfg.prompts,
                                                Rng::derive(cfg.seed, i));
      auto result = synthclient::synthesize(request, *backend);

      fs::path image_path = cfg.out_dir / "images" / (scene_id + ".png");
      write_binary_file_atomic(image_path, result.image_png);

      // labels always derive from the mask this image was conditioned on
      auto mask = rasterizer::decode_mask_png(mask_png);
      datasetkit::LabeledImage entry;
      entry.image_path = image_path.string();
      entry.width = mask.width;
      entry.height = mask.height;
      entry.boxes = datasetkit::mask_to_boxes(mask, cfg.min_pixels);
      entry.source = datasetkit::Source::synthetic;
      entry.scene_ref = scene_id;
      fs::path label_path = datasetkit::write_yolo_labels(entry, cfg.out_dir / "labels");

      nlohmann::json boxes = nlohmann::json::array();
      for (const auto& b : entry.boxes)
        boxes.push_back(nlohmann::json::array({b.class_id, b.cx, b.cy, b.w, b.h}));
      results[i].entry = {
          {"scene_ref", scene_id},          {"image", image_path.string()},
          {"label", label_path.string()},   {"width", entry.width},
          {"height", entry.height},         {"boxes", boxes},
          {"request_digest", result.request_digest},
          {"backend_id", result.backend_id},
      };
      std::fprintf(stderr, "[synth] %s: %zu boxes (%s)\n", scene_id.c_str(),
                   entry.boxes.size(), result.backend_id.c_str());
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(fail_mutex);
      results[i].failure = e.what();
      std::fprintf(stderr, "[synth] %s FAILED: %s\n", scene_id.c_str(), e.what());
      if (cfg.fail_fast) aborted = true;
    }
  });

  nlohmann::json entries = nlohmann::json::array();
  nlohmann::json failures = nlohmann::json::array();
  for (size_t i = 0; i < results.size(); ++i) {
    if (!results[i].failure.empty())
      failures.push_back({{"scene_ref", scene_files[i].stem().string()},
                          {"error", results[i].failure}});
    else if (!results[i].entry.is_null())
      entries.push_back(results[i].entry);
  }

  nlohmann::json manifest{
      {"schema", "reefforge.synth/1"},
      {"tool_version", kToolVersion},
      {"seed", cfg.seed},
      {"rng", {{"name", Rng::kAlgorithm}, {"version", Rng::kVersion}}},
      {"config_echo", cfg.echo().serialize()},
      {"reference_pool", pool_provenance},
      {"min_pixels", cfg.min_pixels},
      {"entries", entries},
      {"failures", failures},
  };
  write_text_file_atomic(cfg.out_dir / "manifest.json", manifest.dump(2) + "\n");

  if (!failures.empty()) {
    std::fprintf(stderr, "[synth] %zu scene(s) failed\n", failures.size());
    return 3;
  }
  std::fprintf(stderr, "[synth] %zu images + labels in %s\n", entries.size(),
               cfg.out_dir.string().c_str());
  return 0;
}

}  // namespace reefforge::cli
