#include "reefforge/evalbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

#include "reefforge/datasetkit.hpp"
#include "reefforge/errors.hpp"
#include "reefforge/fsio.hpp"

namespace reefforge::evalbench {

using nlohmann::json;

namespace {

void validate_rect(const Rect& r, const char* who) {
  if (!(r.x_min < r.x_max) || !(r.y_min < r.y_max))
    throw ValidationError(std::string(who) + ": degenerate rectangle");
}

// content ordering: confidence desc, then image_id / coordinates / class so
// equal-confidence inputs rank the same regardless of input order
bool det_before(const Detection& a, const Detection& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  if (a.box.x_min != b.box.x_min) return a.box.x_min < b.box.x_min;
  if (a.box.y_min != b.box.y_min) return a.box.y_min < b.box.y_min;
  if (a.box.x_max != b.box.x_max) return a.box.x_max < b.box.x_max;
  if (a.box.y_max != b.box.y_max) return a.box.y_max < b.box.y_max;
  return a.class_id < b.class_id;
}

bool record_before(const MatchRecord& a, const MatchRecord& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  if (a.box.x_min != b.box.x_min) return a.box.x_min < b.box.x_min;
  if (a.box.y_min != b.box.y_min) return a.box.y_min < b.box.y_min;
  if (a.box.x_max != b.box.x_max) return a.box.x_max < b.box.x_max;
  return a.box.y_max < b.box.y_max;
}

bool gt_before(const GroundTruth& a, const GroundTruth& b) {
  if (a.box.x_min != b.box.x_min) return a.box.x_min < b.box.x_min;
  if (a.box.y_min != b.box.y_min) return a.box.y_min < b.box.y_min;
  if (a.box.x_max != b.box.x_max) return a.box.x_max < b.box.x_max;
  if (a.box.y_max != b.box.y_max) return a.box.y_max < b.box.y_max;
  return a.class_id < b.class_id;
}

}  // namespace

double iou(const Rect& a, const Rect& b) {
  validate_rect(a, "iou");
  validate_rect(b, "iou");
  double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  double inter = ix * iy;
  double area_a = (a.x_max - a.x_min) * (a.y_max - a.y_min);
  double area_b = (b.x_max - b.x_min) * (b.y_max - b.y_min);
  return inter / (area_a + area_b - inter);
}

MatchResult match_detections(const std::vector<Detection>& detections,
                             const std::vector<GroundTruth>& ground_truths,
                             double iou_threshold, size_t max_det) {
  if (iou_threshold <= 0.0 || iou_threshold > 1.0)
    throw ValidationError("match_detections: iou_threshold must be in (0, 1]");
  for (const auto& d : detections) {
    validate_rect(d.box, "detection");
    if (d.confidence < 0.0 || d.confidence > 1.0)
      throw ValidationError("match_detections: confidence must be in [0, 1]");
  }
  for (const auto& g : ground_truths) validate_rect(g.box, "ground truth");

  std::map<std::string, std::vector<Detection>> dets_by_image;
  for (const auto& d : detections) dets_by_image[d.image_id].push_back(d);
  std::map<std::string, std::vector<GroundTruth>> gts_by_image;
  for (const auto& g : ground_truths) gts_by_image[g.image_id].push_back(g);

  MatchResult result;
  result.num_gt = ground_truths.size();

  for (auto& [image_id, dets] : dets_by_image) {
    std::sort(dets.begin(), dets.end(), det_before);
    if (dets.size() > max_det) dets.resize(max_det);  // confidence cap, pre-matching

    std::vector<GroundTruth> gts;
    if (auto it = gts_by_image.find(image_id); it != gts_by_image.end()) gts = it->second;
    std::sort(gts.begin(), gts.end(), gt_before);
    std::vector<bool> taken(gts.size(), false);

    for (const auto& d : dets) {
      double best = 0.0;
      size_t best_gt = gts.size();
      for (size_t g = 0; g < gts.size(); ++g) {
        if (taken[g]) continue;
        double v = iou(d.box, gts[g].box);
        if (v >= iou_threshold && v > best) {
          best = v;
          best_gt = g;
        }
      }
      MatchRecord rec{image_id, d.box, d.confidence, best_gt < gts.size()};
      if (rec.is_tp) taken[best_gt] = true;
      result.records.push_back(rec);
    }
  }

  for (const auto& r : result.records) (r.is_tp ? result.tp : result.fp)++;
  result.fn = result.num_gt - result.tp;
  return result;
}

double average_precision(const MatchResult& matches) {
  if (matches.num_gt == 0)
    throw UndefinedMetricError("average_precision: no ground truths");
  if (matches.records.empty()) return 0.0;

  std::vector<MatchRecord> recs = matches.records;
  std::sort(recs.begin(), recs.end(), record_before);

  size_t n = recs.size();
  std::vector<double> precision(n), recall(n);
  size_t tp = 0;
  for (size_t i = 0; i < n; ++i) {
    if (recs[i].is_tp) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(matches.num_gt);
  }
  // precision envelope: monotone non-increasing from the right
  for (size_t i = n - 1; i-- > 0;) precision[i] = std::max(precision[i], precision[i + 1]);

  double total = 0.0;
  size_t cursor = 0;
  for (int k = 0; k <= 100; ++k) {
    double r = static_cast<double>(k) / 100.0;
    while (cursor < n && recall[cursor] < r) ++cursor;
    if (cursor < n) total += precision[cursor];
  }
  return total / 101.0;
}

void validate_report(const EvalReport& report) {
  auto it50 = report.per_threshold_ap.find(50);
  if (it50 == report.per_threshold_ap.end() || report.map50 != it50->second)
    throw ValidationError("eval report: map50 must equal AP@0.50");
  if (report.per_threshold_ap.size() != 10)
    throw ValidationError("eval report: expected 10 IoU thresholds 50..95");
  double sum = 0.0;
  for (const auto& [thr, ap] : report.per_threshold_ap) {
    if (ap < 0.0 || ap > 1.0) throw ValidationError("eval report: AP outside [0,1]");
    if (thr < 50 || thr > 95 || thr % 5 != 0)
      throw ValidationError("eval report: unexpected threshold");
    sum += ap;
  }
  if (std::abs(report.map50_95 - sum / 10.0) > 1e-12)
    throw ValidationError("eval report: map50_95 must be the mean over thresholds");
}

EvalReport map_report(const std::vector<Detection>& detections,
                      const std::vector<GroundTruth>& ground_truths, size_t max_det) {
  EvalReport report;
  double sum = 0.0;
  for (int thr = 50; thr <= 95; thr += 5) {
    MatchResult matches =
        match_detections(detections, ground_truths, static_cast<double>(thr) / 100.0, max_det);
    double ap = average_precision(matches);
    report.per_threshold_ap[thr] = ap;
    sum += ap;
    if (thr == 50) {
      report.tp = matches.tp;
      report.fp = matches.fp;
      report.fn = matches.fn;
    }
  }
  report.map50 = report.per_threshold_ap[50];
  report.map50_95 = sum / 10.0;
  validate_report(report);
  return report;
}

void validate_bench(const BenchStats& stats) {
  if (stats.inference_ms_mean <= 0.0)
    throw ValidationError("bench: mean inference time must be positive");
  if (stats.pipeline_hz > 1000.0 / stats.inference_ms_mean + 1e-9)
    throw ValidationError("bench: pipeline_hz exceeds 1000/inference_ms_mean");
}

BenchStats bench(const std::function<void(const ImageRGB8&)>& runner,
                 const std::vector<ImageRGB8>& frames, size_t warmup) {
  if (frames.size() <= warmup)
    throw ValidationError("bench: need more frames than warmup iterations");

  using clock = std::chrono::steady_clock;
  for (size_t i = 0; i < warmup; ++i) {
    try {
      runner(frames[i]);
    } catch (const std::exception& e) {
      throw Error("bench: runner failed at frame " + std::to_string(i) + ": " + e.what(), 1);
    }
  }

  std::vector<double> durations_ms;
  durations_ms.reserve(frames.size() - warmup);
  auto span_start = clock::now();
  for (size_t i = warmup; i < frames.size(); ++i) {
    auto t0 = clock::now();
    try {
      runner(frames[i]);
    } catch (const std::exception& e) {
      throw Error("bench: runner failed at frame " + std::to_string(i) + ": " + e.what(), 1);
    }
    durations_ms.push_back(
        std::chrono::duration<double, std::milli>(clock::now() - t0).count());
  }
  double span_s =
      std::chrono::duration<double>(clock::now() - span_start).count();

  BenchStats stats;
  stats.frame_count = durations_ms.size();
  stats.warmup_count = warmup;
  stats.inference_ms_mean =
      std::accumulate(durations_ms.begin(), durations_ms.end(), 0.0) /
      static_cast<double>(durations_ms.size());
  std::vector<double> sorted = durations_ms;
  std::sort(sorted.begin(), sorted.end());
  stats.inference_ms_median = sorted[sorted.size() / 2];
  size_t p95_idx = static_cast<size_t>(
      std::min(sorted.size() - 1.0, std::ceil(0.95 * static_cast<double>(sorted.size())) - 1));
  stats.inference_ms_p95 = sorted[p95_idx];
  stats.pipeline_hz = static_cast<double>(durations_ms.size()) / span_s;
  validate_bench(stats);
  return stats;
}

namespace {

std::string fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string pad(std::string s, size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

TableOutput render_tables(const ReportBundle& bundle) {
  if (bundle.models.empty() && bundle.ablation_synth.empty())
    throw ValidationError("render_tables: empty bundle");
  if (bundle.ablation_synth.size() != bundle.ablation_real.size())
    throw ValidationError("render_tables: ablation lists differ in length");
  for (size_t i = 0; i < bundle.ablation_synth.size(); ++i)
    if (bundle.ablation_synth[i].first != bundle.ablation_real[i].first)
      throw ValidationError("render_tables: ablation model mismatch at row " +
                            std::to_string(i) + " (" + bundle.ablation_synth[i].first +
                            " vs " + bundle.ablation_real[i].first + ")");

  TableOutput out;
  if (!bundle.models.empty()) {
    out.text += "Model performance\n";
    out.text += pad("Model", 14) + pad("Inference (ms)", 16) + pad("Frequency (Hz)", 16) +
                pad("mAP50", 8) + "mAP50-95\n";
    out.csv_models = "model,inference_ms,frequency_hz,map50,map50_95\n";
    for (const auto& [name, m] : bundle.models) {
      out.text += pad(name, 14) + pad(fmt1(m.inference_ms), 16) +
                  pad(fmt1(m.frequency_hz), 16) + pad(fmt3(m.map50), 8) +
                  fmt3(m.map50_95) + "\n";
      out.csv_models += name + "," + fmt1(m.inference_ms) + "," + fmt1(m.frequency_hz) +
                        "," + fmt3(m.map50) + "," + fmt3(m.map50_95) + "\n";
    }
  }
  if (!bundle.ablation_synth.empty()) {
    if (!out.text.empty()) out.text += "\n";
    out.text += "Synthetic-data ablation: (S) trained with synthetic + real, (R) real only\n";
    out.csv_ablation = "model,map50_s,map50_95_s,map50_r,map50_95_r\n";
    for (size_t i = 0; i < bundle.ablation_synth.size(); ++i) {
      const auto& [name, s] = bundle.ablation_synth[i];
      const auto& r = bundle.ablation_real[i].second;
      out.text += name + " (S) " + fmt3(s.map50) + "/" + fmt3(s.map50_95) + " vs (R) " +
                  fmt3(r.map50) + "/" + fmt3(r.map50_95) + "\n";
      out.csv_ablation += name + "," + fmt3(s.map50) + "," + fmt3(s.map50_95) + "," +
                          fmt3(r.map50) + "," + fmt3(r.map50_95) + "\n";
    }
  }
  return out;
}

namespace {

std::string id_from_json(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<int64_t>());
  throw ParseError("image_id must be a string or integer");
}

Rect rect_from_json(const json& j) {
  Rect r{j.at("x_min").get<double>(), j.at("y_min").get<double>(),
         j.at("x_max").get<double>(), j.at("y_max").get<double>()};
  validate_rect(r, "file");
  return r;
}

}  // namespace

std::vector<Detection> load_detections_json(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw ParseError(path.string() + ": expected a JSON array");
  std::vector<Detection> out;
  try {
    for (const auto& e : j) {
      Detection d;
      d.image_id = id_from_json(e.at("image_id"));
      d.box = rect_from_json(e);
      d.confidence = e.at("confidence").get<double>();
      if (d.confidence < 0.0 || d.confidence > 1.0)
        throw ParseError(path.string() + ": confidence outside [0,1]");
      d.class_id = e.value("class_id", 0);
      out.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return out;
}

void save_detections_json(const std::vector<Detection>& detections,
                          const std::filesystem::path& path) {
  json arr = json::array();
  for (const auto& d : detections)
    arr.push_back(json{{"image_id", d.image_id},
                       {"x_min", d.box.x_min},
                       {"y_min", d.box.y_min},
                       {"x_max", d.box.x_max},
                       {"y_max", d.box.y_max},
                       {"confidence", d.confidence},
                       {"class_id", d.class_id}});
  write_text_file_atomic(path, arr.dump(2) + "\n");
}

std::vector<GroundTruth> load_ground_truth_json(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw ParseError(path.string() + ": expected a JSON array");
  std::vector<GroundTruth> out;
  try {
    for (const auto& e : j) {
      GroundTruth g;
      g.image_id = id_from_json(e.at("image_id"));
      g.box = rect_from_json(e);
      g.class_id = e.value("class_id", 0);
      out.push_back(std::move(g));
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return out;
}

std::vector<GroundTruth> load_ground_truth_yolo(const std::filesystem::path& labels_dir,
                                                const std::filesystem::path& size_index) {
  json idx;
  try {
    idx = json::parse(read_text_file(size_index));
  } catch (const json::exception& e) {
    throw ParseError(size_index.string() + ": " + e.what());
  }

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(labels_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<GroundTruth> out;
  for (const auto& file : files) {
    std::string image_id = file.stem().string();
    if (!idx.contains(image_id))
      throw ParseError(size_index.string() + ": no image size for `" + image_id + "`");
    const auto& wh = idx.at(image_id);
    if (!wh.is_array() || wh.size() != 2)
      throw ParseError(size_index.string() + ": size of `" + image_id +
                       "` must be [width, height]");
    int w = wh[0].get<int>();
    int h = wh[1].get<int>();
    for (const auto& b : datasetkit::read_yolo_labels(file, w, h)) {
      GroundTruth g;
      g.image_id = image_id;
      g.class_id = b.class_id;
      g.box = {(b.cx - b.w / 2) * w, (b.cy - b.h / 2) * h, (b.cx + b.w / 2) * w,
               (b.cy + b.h / 2) * h};
      out.push_back(std::move(g));
    }
  }
  return out;
}

std::string report_to_json(const EvalReport& report) {
  json thresholds;
  for (const auto& [thr, ap] : report.per_threshold_ap)
    thresholds[std::to_string(thr)] = ap;
  json j{{"per_threshold_ap", thresholds},
         {"map50", report.map50},
         {"map50_95", report.map50_95},
         {"tp", report.tp},
         {"fp", report.fp},
         {"fn", report.fn},
         {"config_echo", report.config_echo.serialize()}};
  return j.dump(2) + "\n";
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
  write_text_file_atomic(path, report_to_json(report));
}

ReportBundle load_bundle_json(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  ReportBundle bundle;
  try {
    for (const auto& e : j.value("models", json::array()))
      bundle.models.emplace_back(
          e.at("name").get<std::string>(),
          ModelMetrics{e.at("inference_ms").get<double>(), e.at("frequency_hz").get<double>(),
                       e.at("map50").get<double>(), e.at("map50_95").get<double>()});
    auto load_ablation = [&j](const char* key) {
      std::vector<std::pair<std::string, AblationMetrics>> list;
      for (const auto& e : j.value(key, json::array()))
        list.emplace_back(e.at("name").get<std::string>(),
                          AblationMetrics{e.at("map50").get<double>(),
                                          e.at("map50_95").get<double>()});
      return list;
    };
    bundle.ablation_synth = load_ablation("ablation_synth");
    bundle.ablation_real = load_ablation("ablation_real");
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return bundle;
}

std::string bench_report_to_json(const BenchReport& report) {
  json models;
  for (const auto& [name, s] : report.per_model)
    models[name] = json{{"inference_ms_mean", s.inference_ms_mean},
                        {"inference_ms_median", s.inference_ms_median},
                        {"inference_ms_p95", s.inference_ms_p95},
                        {"pipeline_hz", s.pipeline_hz},
                        {"frame_count", s.frame_count},
                        {"warmup_count", s.warmup_count}};
  return json{{"per_model", models}}.dump(2) + "\n";
}

void save_bench_report(const BenchReport& report, const std::filesystem::path& path) {
  write_text_file_atomic(path, bench_report_to_json(report));
}

}  // namespace reefforge::evalbench
