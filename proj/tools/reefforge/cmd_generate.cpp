#include <cstdio>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "reefforge/fsio.hpp"
#include "reefforge/rasterizer.hpp"
#include "reefforge/rng.hpp"
#include "reefforge/version.hpp"

namespace reefforge::cli {

namespace {

constexpr uint64_t kCountStream = 0x636e74ULL;   // "cnt"
constexpr uint64_t kCameraStream = 0x63616dULL;  // "cam"

}  // namespace

int run_generate(const PipelineConfig& cfg) {
  if (cfg.oysters_min < 0 || cfg.oysters_min > cfg.oysters_max)
    throw ValidationError("generate: oyster count range malformed");

  ensure_directory(cfg.out_dir);
  const Rect2 region = region_rect(cfg);
  const auto cam_ranges = camera_ranges(cfg);
  const auto shell_ranges = oyster_ranges(cfg);

  std::vector<std::string> scene_ids(cfg.scenes);

  parallel_for(cfg.scenes, effective_threads(cfg), [&](size_t i) {
    const std::string scene_id = scene_id_for(i);
    const uint64_t scene_seed = Rng::derive(cfg.seed, i);
    try {
      Rng count_rng(Rng::derive(scene_seed, kCountStream));
      size_t n = static_cast<size_t>(count_rng.uniform_int(cfg.oysters_min, cfg.oysters_max));

      scenegen::PlacementConfig placement_cfg;
      placement_cfg.oyster_ranges = shell_ranges;
      auto scene = scenegen::place_oysters(n, region, scene_seed, cfg.min_spacing_m,
                                           placement_cfg);
      auto camera = scenegen::sample_camera(Rng::derive(scene_seed, kCameraStream),
                                            cam_ranges);

      rasterizer::RenderOptions opts;
      opts.near_plane_m = cfg.near_plane_m;
      opts.threads = 1;  // scene-level parallelism already saturates the pool
      opts.make_preview = cfg.preview;
      auto out = rasterizer::render(scene, camera, opts);
      out.scene_ref = scene_id;

      write_binary_file_atomic(cfg.out_dir / (scene_id + "_depth.png"),
                               rasterizer::encode_depth_png(out.depth, cfg.max_depth_m));
      auto mask_pngs = rasterizer::encode_mask_png(out.mask);
      write_binary_file_atomic(cfg.out_dir / (scene_id + "_mask.png"), mask_pngs.raw16);
      write_binary_file_atomic(cfg.out_dir / (scene_id + "_mask_vis.png"), mask_pngs.rgb);
      if (out.preview)
        write_binary_file_atomic(cfg.out_dir / (scene_id + "_preview.png"),
                                 encode_png(*out.preview));

      scenegen::SceneDoc doc;
      doc.scene_id = scene_id;
      doc.placement = std::move(scene);
      doc.camera = camera;
      doc.config_echo = cfg.echo().serialize();
      write_text_file_atomic(cfg.out_dir / (scene_id + ".json"), scenegen::scene_to_json(doc));

      scene_ids[i] = scene_id;
      std::fprintf(stderr, "[generate] %s: %zu oysters\n", scene_id.c_str(), n);
    } catch (const Error& e) {
      throw Error("generate: scene seed " + std::to_string(scene_seed) + " (" + scene_id +
                      "): " + e.what(),
                  e.exit_code());
    }
  });

  nlohmann::json manifest{
      {"schema", "reefforge.generate/1"},
      {"tool_version", kToolVersion},
      {"seed", cfg.seed},
      {"rng", {{"name", Rng::kAlgorithm}, {"version", Rng::kVersion}}},
      {"config_echo", cfg.echo().serialize()},
      {"scenes", scene_ids},
  };
  write_text_file_atomic(cfg.out_dir / "manifest.json", manifest.dump(2) + "\n");
  std::fprintf(stderr, "[generate] wrote %zu scenes to %s\n", cfg.scenes,
               cfg.out_dir.string().c_str());
  return 0;
}

}  // namespace reefforge::cli
