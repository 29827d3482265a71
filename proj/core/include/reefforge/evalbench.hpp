#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "reefforge/config.hpp"
#include "reefforge/image.hpp"

namespace reefforge::evalbench {

// Pixel-space rectangle, x_min < x_max and y_min < y_max.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
};

struct Detection {
  std::string image_id;
  Rect box;
  double confidence = 0.0;  // [0, 1]
  int class_id = 0;
};

struct GroundTruth {
  std::string image_id;
  Rect box;
  int class_id = 0;
};

/// Intersection over union; in [0,1], 1 iff identical, 0 iff disjoint.
/// Degenerate rectangles are a validation error.
double iou(const Rect& a, const Rect& b);

// One confidence-ranked detection outcome at a fixed IoU threshold.
struct MatchRecord {
  std::string image_id;
  Rect box;
  double confidence = 0.0;
  bool is_tp = false;
};

struct MatchResult {
  std::vector<MatchRecord> records;  // all kept detections, every image
  size_t num_gt = 0;
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
};

/// Greedy per-image matching: detections ranked by confidence (ties broken by
/// a content key — image_id, then box coordinates — so the result is
/// invariant to input permutation), truncated to max_det per image, each
/// detection taking the unmatched ground truth of highest IoU >= threshold.
MatchResult match_detections(const std::vector<Detection>& detections,
                             const std::vector<GroundTruth>& ground_truths,
                             double iou_threshold, size_t max_det = 300);

/// COCO-style AP: global confidence sweep over the match records, precision
/// envelope, mean of envelope precision sampled at the 101 recall points
/// 0.00, 0.01, ..., 1.00. Zero ground truths is an undefined-metric error.
double average_precision(const MatchResult& matches);

struct EvalReport {
  std::map<int, double> per_threshold_ap;  // key = IoU threshold in percent (50..95)
  double map50 = 0.0;
  double map50_95 = 0.0;
  size_t tp = 0;  // counted at IoU 0.5 over the full sweep, for inspection
  size_t fp = 0;
  size_t fn = 0;
  KVConfig config_echo;
};

void validate_report(const EvalReport& report);

/// AP at each IoU threshold 0.50, 0.55, ..., 0.95; map50 = AP@0.50,
/// map50_95 = mean over the ten thresholds.
EvalReport map_report(const std::vector<Detection>& detections,
                      const std::vector<GroundTruth>& ground_truths, size_t max_det = 300);

struct BenchStats {
  double inference_ms_mean = 0.0;
  double inference_ms_median = 0.0;
  double inference_ms_p95 = 0.0;
  double pipeline_hz = 0.0;  // completed frames / wall-clock of the measured span
  size_t frame_count = 0;
  size_t warmup_count = 0;
};

// pipeline_hz <= 1000 / inference_ms_mean: end-to-end can only be slower
void validate_bench(const BenchStats& stats);

struct BenchReport {
  std::map<std::string, BenchStats> per_model;
};

/// Runs `runner` over every frame, discards the first `warmup` frames from
/// the statistics, and reports per-frame latency plus end-to-end throughput
/// of the measured span. Runner failures propagate with the frame index.
BenchStats bench(const std::function<void(const ImageRGB8&)>& runner,
                 const std::vector<ImageRGB8>& frames, size_t warmup);

// --- report rendering -------------------------------------------------------

struct ModelMetrics {
  double inference_ms = 0.0;
  double frequency_hz = 0.0;
  double map50 = 0.0;
  double map50_95 = 0.0;
};

struct AblationMetrics {
  double map50 = 0.0;
  double map50_95 = 0.0;
};

struct ReportBundle {
  std::vector<std::pair<std::string, ModelMetrics>> models;
  std::vector<std::pair<std::string, AblationMetrics>> ablation_synth;
  std::vector<std::pair<std::string, AblationMetrics>> ablation_real;
};

struct TableOutput {
  std::string text;          // both tables, human-readable
  std::string csv_models;    // model,inference_ms,frequency_hz,map50,map50_95
  std::string csv_ablation;  // model,map50_s,map50_95_s,map50_r,map50_95_r
};

/// Deterministic text + CSV rendering of the model table and the optional
/// synthetic-vs-real ablation pairs. The two ablation lists must name the
/// same models in the same order.
TableOutput render_tables(const ReportBundle& bundle);

// --- file formats ------------------------------------------------------------

// predictions: JSON array of {image_id, x_min, y_min, x_max, y_max, confidence, class_id}
std::vector<Detection> load_detections_json(const std::filesystem::path& path);
void save_detections_json(const std::vector<Detection>& detections,
                          const std::filesystem::path& path);

// ground truth: same schema minus confidence
std::vector<GroundTruth> load_ground_truth_json(const std::filesystem::path& path);

// ground truth from YOLO label files + an image-size index
// {"image_id": [width, height], ...}; image_id = label file stem
std::vector<GroundTruth> load_ground_truth_yolo(const std::filesystem::path& labels_dir,
                                                const std::filesystem::path& size_index);

std::string report_to_json(const EvalReport& report);
void save_report(const EvalReport& report, const std::filesystem::path& path);

ReportBundle load_bundle_json(const std::filesystem::path& path);

std::string bench_report_to_json(const BenchReport& report);
void save_bench_report(const BenchReport& report, const std::filesystem::path& path);

}  // namespace reefforge::evalbench
