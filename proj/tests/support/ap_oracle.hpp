#pragma once

// Exhaustive PR-sweep reference for the mAP harness. Independent code path:
// greedy matching is re-derived from the documented definition and each of
// the 101 recall points takes a direct max over the sweep (no envelope
// precomputation, no cursor walk).

#include <algorithm>
#include <string>
#include <vector>

#include "reefforge/evalbench.hpp"

namespace oracle {

using reefforge::evalbench::Detection;
using reefforge::evalbench::GroundTruth;
using reefforge::evalbench::Rect;

inline double ref_iou(const Rect& a, const Rect& b) {
  double ix0 = std::max(a.x_min, b.x_min), iy0 = std::max(a.y_min, b.y_min);
  double ix1 = std::min(a.x_max, b.x_max), iy1 = std::min(a.y_max, b.y_max);
  if (ix1 <= ix0 || iy1 <= iy0) return 0.0;
  double inter = (ix1 - ix0) * (iy1 - iy0);
  double ua = (a.x_max - a.x_min) * (a.y_max - a.y_min) +
              (b.x_max - b.x_min) * (b.y_max - b.y_min) - inter;
  return inter / ua;
}

// same ordering convention as the harness (part of the matching definition)
inline bool ref_det_order(const Detection& a, const Detection& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  if (a.box.x_min != b.box.x_min) return a.box.x_min < b.box.x_min;
  if (a.box.y_min != b.box.y_min) return a.box.y_min < b.box.y_min;
  if (a.box.x_max != b.box.x_max) return a.box.x_max < b.box.x_max;
  if (a.box.y_max != b.box.y_max) return a.box.y_max < b.box.y_max;
  return a.class_id < b.class_id;
}

inline bool ref_gt_order(const GroundTruth& a, const GroundTruth& b) {
  if (a.box.x_min != b.box.x_min) return a.box.x_min < b.box.x_min;
  if (a.box.y_min != b.box.y_min) return a.box.y_min < b.box.y_min;
  if (a.box.x_max != b.box.x_max) return a.box.x_max < b.box.x_max;
  if (a.box.y_max != b.box.y_max) return a.box.y_max < b.box.y_max;
  return a.class_id < b.class_id;
}

inline double ref_ap(std::vector<Detection> dets, std::vector<GroundTruth> gts,
                     double thr, size_t max_det) {
  // collect image ids
  std::vector<std::string> images;
  for (const auto& d : dets) images.push_back(d.image_id);
  for (const auto& g : gts) images.push_back(g.image_id);
  std::sort(images.begin(), images.end());
  images.erase(std::unique(images.begin(), images.end()), images.end());

  struct Entry {
    double conf;
    bool tp;
    std::string image_id;
    Rect box;
  };
  std::vector<Entry> sweep;
  size_t num_gt = gts.size();

  for (const auto& img : images) {
    std::vector<Detection> d_img;
    for (const auto& d : dets)
      if (d.image_id == img) d_img.push_back(d);
    std::vector<GroundTruth> g_img;
    for (const auto& g : gts)
      if (g.image_id == img) g_img.push_back(g);

    std::sort(d_img.begin(), d_img.end(), ref_det_order);
    if (d_img.size() > max_det) d_img.resize(max_det);
    std::sort(g_img.begin(), g_img.end(), ref_gt_order);

    std::vector<bool> used(g_img.size(), false);
    for (const auto& d : d_img) {
      int best = -1;
      double best_iou = 0.0;
      for (size_t g = 0; g < g_img.size(); ++g) {
        if (used[g]) continue;
        double v = ref_iou(d.box, g_img[g].box);
        if (v >= thr && v > best_iou) {
          best_iou = v;
          best = static_cast<int>(g);
        }
      }
      if (best >= 0) used[static_cast<size_t>(best)] = true;
      sweep.push_back({d.confidence, best >= 0, d.image_id, d.box});
    }
  }

  std::sort(sweep.begin(), sweep.end(), [](const Entry& a, const Entry& b) {
    if (a.conf != b.conf) return a.conf > b.conf;
    if (a.image_id != b.image_id) return a.image_id < b.image_id;
    if (a.box.x_min != b.box.x_min) return a.box.x_min < b.box.x_min;
    if (a.box.y_min != b.box.y_min) return a.box.y_min < b.box.y_min;
    if (a.box.x_max != b.box.x_max) return a.box.x_max < b.box.x_max;
    return a.box.y_max < b.box.y_max;
  });

  std::vector<double> prec(sweep.size()), rec(sweep.size());
  size_t tp = 0;
  for (size_t i = 0; i < sweep.size(); ++i) {
    if (sweep[i].tp) ++tp;
    prec[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    rec[i] = num_gt ? static_cast<double>(tp) / static_cast<double>(num_gt) : 0.0;
  }

  double total = 0.0;
  for (int k = 0; k <= 100; ++k) {
    double r = static_cast<double>(k) / 100.0;
    double best_p = 0.0;
    for (size_t i = 0; i < sweep.size(); ++i)
      if (rec[i] >= r) best_p = std::max(best_p, prec[i]);
    total += best_p;
  }
  return total / 101.0;
}

struct RefMap {
  double map50;
  double map50_95;
};

inline RefMap ref_map(const std::vector<Detection>& dets,
                      const std::vector<GroundTruth>& gts, size_t max_det = 300) {
  RefMap out{0.0, 0.0};
  double sum = 0.0;
  for (int t = 50; t <= 95; t += 5) {
    double ap = ref_ap(dets, gts, static_cast<double>(t) / 100.0, max_det);
    if (t == 50) out.map50 = ap;
    sum += ap;
  }
  out.map50_95 = sum / 10.0;
  return out;
}

}  // namespace oracle
