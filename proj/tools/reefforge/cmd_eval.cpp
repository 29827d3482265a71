#include <cstdio>

#include "common.hpp"
#include "reefforge/evalbench.hpp"
#include "reefforge/fsio.hpp"

namespace reefforge::cli {

namespace fs = std::filesystem;

int run_eval(const PipelineConfig& cfg, const fs::path& predictions, const fs::path& gt_json,
             const fs::path& gt_labels, const fs::path& image_index, size_t max_det) {
  auto dets = evalbench::load_detections_json(predictions);

  std::vector<evalbench::GroundTruth> gts;
  if (!gt_json.empty())
    gts = evalbench::load_ground_truth_json(gt_json);
  else if (!gt_labels.empty() && !image_index.empty())
    gts = evalbench::load_ground_truth_yolo(gt_labels, image_index);
  else
    throw ValidationError("eval: provide --gt-json or (--gt-labels and --image-index)");

  auto report = evalbench::map_report(dets, gts, max_det);
  report.config_echo = cfg.echo();

  ensure_directory(cfg.out_dir);
  evalbench::save_report(report, cfg.out_dir / "eval_report.json");

  std::printf("mAP50      %.6f\n", report.map50);
  std::printf("mAP50-95   %.6f\n", report.map50_95);
  std::printf("TP/FP/FN   %zu/%zu/%zu (IoU 0.5, full sweep)\n", report.tp, report.fp,
              report.fn);
  std::fprintf(stderr, "[eval] report written to %s\n",
               (cfg.out_dir / "eval_report.json").string().c_str());
  return 0;
}

}  // namespace reefforge::cli
