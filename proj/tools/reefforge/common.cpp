#include "common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

#include "reefforge/errors.hpp"
#include "reefforge/fsio.hpp"
#include "reefforge/image.hpp"
#include "reefforge/png_io.hpp"
#include "reefforge/rng.hpp"

namespace reefforge::cli {

KVConfig PipelineConfig::echo() const {
  KVConfig kv;
  kv.set("seed", static_cast<int64_t>(seed));
  kv.set("threads", static_cast<int64_t>(threads));
  kv.set("scenes", static_cast<int64_t>(scenes));
  kv.set("oysters_min", static_cast<int64_t>(oysters_min));
  kv.set("oysters_max", static_cast<int64_t>(oysters_max));
  kv.set("region_w_m", region_w_m);
  kv.set("region_h_m", region_h_m);
  kv.set("min_spacing_m", min_spacing_m);
  kv.set("image_width", static_cast<int64_t>(image_width));
  kv.set("image_height", static_cast<int64_t>(image_height));
  kv.set("fx", fx);
  kv.set("fy", fy);
  kv.set("cam_height_min", cam_height_min);
  kv.set("cam_height_max", cam_height_max);
  kv.set("cam_tilt_min_deg", cam_tilt_min_deg);
  kv.set("cam_tilt_max_deg", cam_tilt_max_deg);
  kv.set("max_depth_m", max_depth_m);
  kv.set("near_plane_m", near_plane_m);
  kv.set("min_pixels", static_cast<int64_t>(min_pixels));
  kv.set("real_train_frac", real_train_frac);
  kv.set("denoise_strength", prompts.denoise_strength);
  kv.set("rng", std::string(Rng::kAlgorithm) + "/v" + std::to_string(Rng::kVersion));
  return kv;
}

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  KVConfig kv = KVConfig::load(path);
  cfg.seed = static_cast<uint64_t>(kv.get_int("seed", static_cast<int64_t>(cfg.seed)));
  cfg.threads = static_cast<int>(kv.get_int("threads", cfg.threads));
  cfg.out_dir = kv.get_string("out", cfg.out_dir.string());
  cfg.scenes = static_cast<size_t>(kv.get_int("scenes", static_cast<int64_t>(cfg.scenes)));
  cfg.oysters_min = static_cast<int>(kv.get_int("oysters_min", cfg.oysters_min));
  cfg.oysters_max = static_cast<int>(kv.get_int("oysters_max", cfg.oysters_max));
  cfg.region_w_m = kv.get_double("region_w_m", cfg.region_w_m);
  cfg.region_h_m = kv.get_double("region_h_m", cfg.region_h_m);
  cfg.min_spacing_m = kv.get_double("min_spacing_m", cfg.min_spacing_m);
  cfg.image_width = static_cast<int>(kv.get_int("image_width", cfg.image_width));
  cfg.image_height = static_cast<int>(kv.get_int("image_height", cfg.image_height));
  cfg.fx = kv.get_double("fx", cfg.fx);
  cfg.fy = kv.get_double("fy", cfg.fy);
  cfg.cam_height_min = kv.get_double("cam_height_min", cfg.cam_height_min);
  cfg.cam_height_max = kv.get_double("cam_height_max", cfg.cam_height_max);
  cfg.cam_tilt_min_deg = kv.get_double("cam_tilt_min_deg", cfg.cam_tilt_min_deg);
  cfg.cam_tilt_max_deg = kv.get_double("cam_tilt_max_deg", cfg.cam_tilt_max_deg);
  cfg.max_depth_m = kv.get_double("max_depth_m", cfg.max_depth_m);
  cfg.near_plane_m = kv.get_double("near_plane_m", cfg.near_plane_m);
  cfg.preview = kv.get_bool("preview", cfg.preview);
  cfg.backend_url = kv.get_string("backend_url", cfg.backend_url);
  cfg.concurrency = static_cast<int>(kv.get_int("concurrency", cfg.concurrency));
  cfg.min_pixels = static_cast<size_t>(
      kv.get_int("min_pixels", static_cast<int64_t>(cfg.min_pixels)));
  cfg.real_train_frac = kv.get_double("real_train_frac", cfg.real_train_frac);
  cfg.prompts.positive = kv.get_string("positive_prompt", cfg.prompts.positive);
  cfg.prompts.negative = kv.get_string("negative_prompt", cfg.prompts.negative);
  cfg.prompts.denoise_strength =
      kv.get_double("denoise_strength", cfg.prompts.denoise_strength);
  cfg.prompts.max_depth_m = cfg.max_depth_m;
}

int effective_threads(const PipelineConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string scene_id_for(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%04zu", index);
  return buf;
}

scenegen::CameraRanges camera_ranges(const PipelineConfig& cfg) {
  scenegen::CameraRanges r;
  r.height_m = {cfg.cam_height_min, cfg.cam_height_max};
  r.tilt_deg = {cfg.cam_tilt_min_deg, cfg.cam_tilt_max_deg};
  r.fx = cfg.fx;
  r.fy = cfg.fy;
  r.cx = cfg.image_width / 2.0;
  r.cy = cfg.image_height / 2.0;
  r.width = cfg.image_width;
  r.height = cfg.image_height;
  r.look_center_x = 0.0;
  r.look_center_y = 0.0;
  return r;
}

oystermesh::OysterRanges oyster_ranges(const PipelineConfig&) {
  return oystermesh::OysterRanges::defaults();
}

Rect2 region_rect(const PipelineConfig& cfg) {
  return {-cfg.region_w_m / 2, -cfg.region_h_m / 2, cfg.region_w_m / 2, cfg.region_h_m / 2};
}

void parallel_for(size_t count, int threads, const std::function<void(size_t)>& fn) {
  if (count == 0) return;
  int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::vector<uint8_t>> builtin_reference_pool() {
  // four procedural gradient cards; hermetic stand-ins for field imagery
  std::vector<std::vector<uint8_t>> pool;
  for (int k = 0; k < 4; ++k) {
    ImageRGB8 img = ImageRGB8::filled(64, 48, 0, 0, 0);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        uint8_t* px = img.px(x, y);
        px[0] = static_cast<uint8_t>(30 + 20 * k + x % 64);
        px[1] = static_cast<uint8_t>(60 + 10 * k + y % 48);
        px[2] = static_cast<uint8_t>(40 + 5 * k + (x + y) % 32);
      }
    }
    pool.push_back(encode_png(img));
  }
  return pool;
}

std::vector<std::vector<uint8_t>> load_pool_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw ValidationError("reference pool directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<std::vector<uint8_t>> pool;
  for (const auto& f : files) pool.push_back(read_binary_file(f));
  return pool;
}

}  // namespace reefforge::cli
