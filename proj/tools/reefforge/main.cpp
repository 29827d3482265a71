#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "common.hpp"
#include "reefforge/errors.hpp"
#include "reefforge/version.hpp"

using namespace reefforge;
using namespace reefforge::cli;

int main(int argc, char** argv) {
  CLI::App app{"reefforge: procedural oyster-reef synthetic vision-data pipeline"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  PipelineConfig cfg;
  std::string config_path;

  // global flags (flags override config-file values)
  app.add_option("--config", config_path, "flat key: value config file");
  auto* seed_opt = app.add_option("--seed", cfg.seed, "master seed");
  auto* threads_opt =
      app.add_option("--threads", cfg.threads, "worker threads (0 = machine parallelism)");
  std::string out_dir;
  auto* out_opt = app.add_option("--out", out_dir, "output directory");

  // generate
  auto* generate = app.add_subcommand("generate", "render scenes: depth + mask + preview");
  size_t scenes = cfg.scenes;
  int oysters_min = cfg.oysters_min, oysters_max = cfg.oysters_max;
  double min_spacing = cfg.min_spacing_m;
  std::string region;
  bool no_preview = false;
  auto* scenes_opt = generate->add_option("--scenes", scenes, "number of scenes");
  auto* omin_opt = generate->add_option("--oysters-min", oysters_min, "min oysters per scene");
  auto* omax_opt = generate->add_option("--oysters-max", oysters_max, "max oysters per scene");
  auto* region_opt =
      generate->add_option("--region", region, "ground extent WxH in meters, e.g. 2.0x1.5");
  auto* spacing_opt =
      generate->add_option("--min-spacing", min_spacing, "min center spacing in meters");
  generate->add_flag("--no-preview", no_preview, "skip preview images");

  // synth
  auto* synth = app.add_subcommand("synth", "photoreal-ize renders via the diffusion backend");
  std::string scenes_dir, backend_url, real_pool;
  bool mock = false, fail_fast = false;
  int concurrency = cfg.concurrency;
  size_t min_pixels = cfg.min_pixels;
  synth->add_option("--scenes-dir", scenes_dir, "directory with generate outputs")
      ->required();
  auto* backend_opt = synth->add_option("--backend", backend_url, "backend base URL");
  auto* pool_opt = synth->add_option("--real-pool", real_pool,
                                     "directory of real reference images");
  synth->add_flag("--mock", mock, "use the deterministic in-process mock backend");
  synth->add_flag("--fail-fast", fail_fast, "abort on the first backend failure");
  auto* conc_opt = synth->add_option("--concurrency", concurrency, "max in-flight requests");
  auto* minpx_opt =
      synth->add_option("--min-pixels", min_pixels, "min visible pixels for a label");

  // mix
  auto* mix = app.add_subcommand("mix", "assemble + split the mixed dataset");
  std::string real_images, real_labels, synth_dir;
  double frac = cfg.real_train_frac;
  mix->add_option("--real-images", real_images, "directory of real PNG images");
  mix->add_option("--real-labels", real_labels, "directory of matching YOLO labels");
  mix->add_option("--synth-dir", synth_dir, "synth output directory (manifest.json)");
  auto* frac_opt =
      mix->add_option("--frac", frac, "fraction of real data placed in train (default 0.30)");

  // eval
  auto* eval = app.add_subcommand("eval", "COCO-style mAP over a predictions file");
  std::string predictions, gt_json, gt_labels, image_index;
  size_t max_det = 300;
  eval->add_option("--predictions", predictions, "predictions JSON")->required();
  eval->add_option("--gt-json", gt_json, "ground truth JSON");
  eval->add_option("--gt-labels", gt_labels, "ground truth YOLO label directory");
  eval->add_option("--image-index", image_index, "image-size index JSON for --gt-labels");
  eval->add_option("--max-det", max_det, "per-image detection cap (default 300)");

  // bench
  auto* bench = app.add_subcommand("bench", "latency/throughput of a per-frame runner");
  std::string runner = "checksum", model_name = "runner";
  size_t frames = 12, warmup = 2;
  bench->add_option("--runner", runner, "sleep:MS or checksum");
  bench->add_option("--model", model_name, "row name for the report");
  bench->add_option("--frames", frames, "total frames");
  bench->add_option("--warmup", warmup, "frames discarded from stats");

  // report
  auto* report = app.add_subcommand("report", "render model/ablation tables");
  std::string bundle;
  report->add_option("--bundle", bundle, "metrics bundle JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // CLI misuse maps onto the validation exit code
  }

  try {
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    // flags win over the config file
    if (!seed_opt->empty()) cfg.seed = app.get_option("--seed")->as<uint64_t>();
    if (!threads_opt->empty()) cfg.threads = app.get_option("--threads")->as<int>();
    if (!out_opt->empty()) cfg.out_dir = out_dir;

    if (generate->parsed()) {
      if (!scenes_opt->empty()) cfg.scenes = scenes;
      if (!omin_opt->empty()) cfg.oysters_min = oysters_min;
      if (!omax_opt->empty()) cfg.oysters_max = oysters_max;
      if (!spacing_opt->empty()) cfg.min_spacing_m = min_spacing;
      if (!region_opt->empty()) {
        auto x = region.find('x');
        if (x == std::string::npos)
          throw ValidationError("generate: --region must look like 2.0x1.5");
        cfg.region_w_m = std::stod(region.substr(0, x));
        cfg.region_h_m = std::stod(region.substr(x + 1));
      }
      if (no_preview) cfg.preview = false;
      return run_generate(cfg);
    }
    if (synth->parsed()) {
      cfg.mock = mock;
      cfg.fail_fast = fail_fast;
      if (!conc_opt->empty()) cfg.concurrency = concurrency;
      if (!minpx_opt->empty()) cfg.min_pixels = min_pixels;
      if (!pool_opt->empty()) cfg.real_pool_dir = real_pool;
      if (!backend_opt->empty()) {
        cfg.backend_url = backend_url;
      } else if (const char* env = std::getenv("REEFFORGE_BACKEND_URL");
                 env && *env && !mock) {
        cfg.backend_url = env;
      }
      return run_synth(cfg, scenes_dir);
    }
    if (mix->parsed()) {
      if (!frac_opt->empty()) cfg.real_train_frac = frac;
      return run_mix(cfg, real_images, real_labels, synth_dir);
    }
    if (eval->parsed())
      return run_eval(cfg, predictions, gt_json, gt_labels, image_index, max_det);
    if (bench->parsed()) return run_bench(cfg, runner, model_name, frames, warmup);
    if (report->parsed()) return run_report(cfg, bundle);
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
