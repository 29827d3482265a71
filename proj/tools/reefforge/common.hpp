#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "reefforge/config.hpp"
#include "reefforge/scenegen.hpp"
#include "reefforge/synthclient.hpp"

namespace reefforge::cli {

// Resolved pipeline configuration: built-in defaults, overlaid by --config
// file values, overlaid by explicit flags (flags win).
struct PipelineConfig {
  uint64_t seed = 0;
  int threads = 0;  // 0 = machine parallelism
  std::filesystem::path out_dir = "out";

  // generate
  size_t scenes = 10;
  int oysters_min = 20;
  int oysters_max = 80;
  double region_w_m = 2.0;
  double region_h_m = 1.5;
  double min_spacing_m = 0.0;
  int image_width = 640;
  int image_height = 480;
  double fx = 550.0;
  double fy = 550.0;
  double cam_height_min = 0.4;
  double cam_height_max = 1.0;
  double cam_tilt_min_deg = 10.0;
  double cam_tilt_max_deg = 25.0;
  double max_depth_m = 3.0;
  double near_plane_m = 0.05;
  bool preview = true;

  // synth
  std::string backend_url;
  std::filesystem::path real_pool_dir;
  bool mock = false;
  bool fail_fast = false;
  int concurrency = 2;
  size_t min_pixels = 25;
  synthclient::PromptConfig prompts;

  // mix
  double real_train_frac = 0.30;

  KVConfig echo() const;  // flat key:value record for manifests
};

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

int effective_threads(const PipelineConfig& cfg);

std::string scene_id_for(size_t index);

scenegen::CameraRanges camera_ranges(const PipelineConfig& cfg);

oystermesh::OysterRanges oyster_ranges(const PipelineConfig& cfg);

Rect2 region_rect(const PipelineConfig& cfg);

// fixed-chunk worker pool; items must be independent (each writes its own files)
void parallel_for(size_t count, int threads, const std::function<void(size_t)>& fn);

// deterministic built-in reference images for hermetic --mock runs
std::vector<std::vector<uint8_t>> builtin_reference_pool();

// sorted file list (bytes) from a directory, for --real-pool
std::vector<std::vector<uint8_t>> load_pool_dir(const std::filesystem::path& dir);

int run_generate(const PipelineConfig& cfg);
int run_synth(const PipelineConfig& cfg, const std::filesystem::path& scenes_dir);
int run_mix(const PipelineConfig& cfg, const std::filesystem::path& real_images,
            const std::filesystem::path& real_labels, const std::filesystem::path& synth_dir);
int run_eval(const PipelineConfig& cfg, const std::filesystem::path& predictions,
             const std::filesystem::path& gt_json, const std::filesystem::path& gt_labels,
             const std::filesystem::path& image_index, size_t max_det);
int run_bench(const PipelineConfig& cfg, const std::string& runner_spec,
              const std::string& model_name, size_t frames, size_t warmup);
int run_report(const PipelineConfig& cfg, const std::filesystem::path& bundle_path);

}  // namespace reefforge::cli
