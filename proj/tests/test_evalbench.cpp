#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <thread>

#include "reefforge/errors.hpp"
#include "reefforge/evalbench.hpp"
#include "reefforge/fsio.hpp"
#include "reefforge/rng.hpp"
#include "support/ap_oracle.hpp"

using namespace reefforge;
using namespace reefforge::evalbench;

#ifndef REEFFORGE_FIXTURE_DIR
#define REEFFORGE_FIXTURE_DIR "tests/fixtures"
#endif

namespace {

Detection det(const std::string& img, double x0, double y0, double x1, double y1,
              double conf) {
  return {img, {x0, y0, x1, y1}, conf, 0};
}

GroundTruth gt(const std::string& img, double x0, double y0, double x1, double y1) {
  return {img, {x0, y0, x1, y1}, 0};
}

// seeded random instances for the oracle-equivalence property
void random_instance(Rng& rng, std::vector<Detection>& dets, std::vector<GroundTruth>& gts) {
  dets.clear();
  gts.clear();
  size_t n_images = 1 + rng.uniform_index(5);
  for (size_t img = 0; img < n_images; ++img) {
    std::string id = "img" + std::to_string(img);
    size_t n_gt = rng.uniform_index(7);
    for (size_t i = 0; i < n_gt; ++i) {
      double x0 = rng.uniform_real(0, 80), y0 = rng.uniform_real(0, 80);
      gts.push_back(gt(id, x0, y0, x0 + rng.uniform_real(4, 30), y0 + rng.uniform_real(4, 30)));
    }
    size_t n_det = rng.uniform_index(7);
    for (size_t i = 0; i < n_det; ++i) {
      // half the detections perturb a ground truth, half are random
      double conf = rng.uniform_real(0.05, 1.0);
      if (!gts.empty() && rng.uniform_double() < 0.5) {
        const auto& g = gts[rng.uniform_index(gts.size())];
        double dx = rng.uniform_real(-6, 6), dy = rng.uniform_real(-6, 6);
        dets.push_back(det(id, g.box.x_min + dx, g.box.y_min + dy, g.box.x_max + dx,
                           g.box.y_max + dy, conf));
      } else {
        double x0 = rng.uniform_real(0, 80), y0 = rng.uniform_real(0, 80);
        dets.push_back(
            det(id, x0, y0, x0 + rng.uniform_real(4, 30), y0 + rng.uniform_real(4, 30), conf));
      }
    }
  }
}

}  // namespace

TEST_CASE("iou basics") {
  Rect a{0, 0, 10, 10};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, Rect{20, 20, 30, 30}) == 0.0);
  CHECK(iou(a, Rect{5, 5, 15, 15}) == doctest::Approx(25.0 / 175.0).epsilon(1e-12));
  CHECK(iou(a, Rect{5, 5, 15, 15}) == iou(Rect{5, 5, 15, 15}, a));
  CHECK_THROWS_AS(iou(a, Rect{5, 5, 5, 10}), ValidationError);
}

TEST_CASE("greedy matching") {
  SUBCASE("single pair above threshold is a TP") {
    auto m = match_detections({det("a", 0, 0, 10, 10, 0.9)}, {gt("a", 0, 2, 10, 12)}, 0.5);
    // IoU = 8*10 / (200-80) ... intersection rows 2..10 -> 0.666 >= 0.5
    CHECK(m.tp == 1);
    CHECK(m.fp == 0);
    CHECK(m.fn == 0);
  }

  SUBCASE("two detections on one gt: higher confidence wins") {
    auto m = match_detections(
        {det("a", 0, 0, 10, 10, 0.6), det("a", 1, 1, 11, 11, 0.9)}, {gt("a", 0, 0, 10, 10)},
        0.5);
    CHECK(m.tp == 1);
    CHECK(m.fp == 1);
    REQUIRE(m.records.size() == 2);
    CHECK(m.records[0].confidence == 0.9);  // ranked first, took the gt
    CHECK(m.records[0].is_tp);
    CHECK(!m.records[1].is_tp);
  }

  SUBCASE("detection cap discards the lowest confidence pre-matching") {
    std::vector<Detection> dets;
    for (int i = 0; i < 301; ++i) {
      double conf = 1.0 - i * 0.001;
      dets.push_back(det("a", i * 2.0, 0, i * 2.0 + 10, 10, conf));
    }
    auto m = match_detections(dets, {}, 0.5, 300);
    CHECK(m.records.size() == 300);
    double min_conf = 1.0;
    for (const auto& r : m.records) min_conf = std::min(min_conf, r.confidence);
    CHECK(min_conf == doctest::Approx(1.0 - 299 * 0.001));
  }

  SUBCASE("matching is invariant to input permutation, ties included") {
    std::vector<Detection> dets{det("a", 0, 0, 10, 10, 0.5), det("a", 2, 2, 12, 12, 0.5),
                                det("b", 0, 0, 8, 8, 0.5)};
    std::vector<GroundTruth> gts{gt("a", 1, 1, 11, 11), gt("b", 0, 0, 8, 8)};
    auto base = match_detections(dets, gts, 0.3);
    std::vector<size_t> perm{2, 0, 1};
    std::vector<Detection> shuffled;
    for (size_t i : perm) shuffled.push_back(dets[i]);
    auto other = match_detections(shuffled, gts, 0.3);
    REQUIRE(base.records.size() == other.records.size());
    for (size_t i = 0; i < base.records.size(); ++i) {
      CHECK(base.records[i].confidence == other.records[i].confidence);
      CHECK(base.records[i].is_tp == other.records[i].is_tp);
      CHECK(base.records[i].box.x_min == other.records[i].box.x_min);
    }
  }
}

TEST_CASE("average precision endpoints") {
  SUBCASE("perfect detections give AP 1") {
    std::vector<Detection> dets{det("a", 0, 0, 10, 10, 1.0), det("b", 5, 5, 15, 15, 1.0)};
    std::vector<GroundTruth> gts{gt("a", 0, 0, 10, 10), gt("b", 5, 5, 15, 15)};
    CHECK(average_precision(match_detections(dets, gts, 0.5)) == 1.0);
  }
  SUBCASE("no detections give AP 0") {
    CHECK(average_precision(match_detections({}, {gt("a", 0, 0, 10, 10)}, 0.5)) == 0.0);
  }
  SUBCASE("zero ground truths is undefined") {
    CHECK_THROWS_AS(average_precision(match_detections({det("a", 0, 0, 10, 10, 1.0)}, {}, 0.5)),
                    UndefinedMetricError);
  }
}

TEST_CASE("frozen mixed TP/FP fixture: 2 images, 3 gts, 4 detections") {
  std::vector<GroundTruth> gts{gt("A", 0, 0, 10, 10), gt("A", 20, 20, 30, 30),
                               gt("B", 0, 0, 10, 10)};
  std::vector<Detection> dets{
      det("A", 0, 0, 10, 10, 0.9),     // IoU 1.0       -> TP at every threshold
      det("A", 21, 21, 31, 31, 0.8),   // IoU 81/119    -> TP up to 0.65
      det("A", 40, 40, 50, 50, 0.7),   // no overlap    -> FP
      det("B", 5, 0, 15, 10, 0.6),     // IoU 1/3       -> FP at 0.5+
  };
  // Hand-computed sweep: thresholds 0.50..0.65 give AP 67/101, the six
  // thresholds 0.70..0.95 give 34/101.
  auto report = map_report(dets, gts);
  CHECK(report.map50 == doctest::Approx(67.0 / 101.0).epsilon(1e-12));
  CHECK(report.map50_95 ==
        doctest::Approx((4 * (67.0 / 101.0) + 6 * (34.0 / 101.0)) / 10.0).epsilon(1e-12));
  CHECK(report.tp == 2);
  CHECK(report.fp == 2);
  CHECK(report.fn == 1);

  // and the independent exhaustive reference agrees
  auto ref = oracle::ref_map(dets, gts);
  CHECK(std::abs(report.map50 - ref.map50) < 1e-9);
  CHECK(std::abs(report.map50_95 - ref.map50_95) < 1e-9);
}

TEST_CASE("harness equals the exhaustive PR-sweep reference on random instances") {
  Rng rng(987654321);
  int evaluated = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Detection> dets;
    std::vector<GroundTruth> gts;
    random_instance(rng, dets, gts);
    if (gts.empty()) continue;
    auto report = map_report(dets, gts);
    auto ref = oracle::ref_map(dets, gts);
    REQUIRE(std::abs(report.map50 - ref.map50) < 1e-9);
    REQUIRE(std::abs(report.map50_95 - ref.map50_95) < 1e-9);
    ++evaluated;
  }
  CHECK(evaluated > 30);
}

TEST_CASE("removing a false positive never lowers AP") {
  Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Detection> dets;
    std::vector<GroundTruth> gts;
    random_instance(rng, dets, gts);
    if (gts.empty() || dets.empty()) continue;
    auto matches = match_detections(dets, gts, 0.5);
    // find an FP record and remove the matching detection
    std::string fp_image;
    Rect fp_box{};
    bool found = false;
    for (const auto& r : matches.records)
      if (!r.is_tp) {
        fp_image = r.image_id;
        fp_box = r.box;
        found = true;
        break;
      }
    if (!found) continue;
    std::vector<Detection> fewer;
    bool removed = false;
    for (const auto& d : dets) {
      if (!removed && d.image_id == fp_image && d.box.x_min == fp_box.x_min &&
          d.box.y_min == fp_box.y_min && d.box.x_max == fp_box.x_max &&
          d.box.y_max == fp_box.y_max) {
        removed = true;
        continue;
      }
      fewer.push_back(d);
    }
    REQUIRE(removed);
    double before = average_precision(matches);
    double after = average_precision(match_detections(fewer, gts, 0.5));
    CHECK(after >= before - 1e-12);
  }
}

TEST_CASE("map50_95 never exceeds the best per-threshold AP") {
  Rng rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Detection> dets;
    std::vector<GroundTruth> gts;
    random_instance(rng, dets, gts);
    if (gts.empty()) continue;
    auto report = map_report(dets, gts);
    double best = 0.0;
    for (const auto& [thr, ap] : report.per_threshold_ap) best = std::max(best, ap);
    CHECK(report.map50_95 <= best + 1e-12);
  }
}

TEST_CASE("bench measures a controlled sleeper") {
  std::vector<ImageRGB8> frames(12, ImageRGB8::filled(8, 8, 0, 0, 0));
  auto stats = bench(
      [](const ImageRGB8&) { std::this_thread::sleep_for(std::chrono::milliseconds(20)); },
      frames, 2);
  CHECK(stats.frame_count == 10);
  CHECK(stats.warmup_count == 2);
  CHECK(stats.inference_ms_mean == doctest::Approx(20.0).epsilon(0.25));
  CHECK(stats.pipeline_hz == doctest::Approx(50.0).epsilon(0.25));
  CHECK(stats.pipeline_hz <= 1000.0 / stats.inference_ms_mean + 1e-9);

  SUBCASE("warmup == frames-1 leaves a single measured frame") {
    auto one = bench([](const ImageRGB8&) {}, frames, 11);
    CHECK(one.frame_count == 1);
    CHECK(one.inference_ms_median == one.inference_ms_p95);
  }

  SUBCASE("too few frames rejected") {
    CHECK_THROWS_AS(bench([](const ImageRGB8&) {}, frames, 12), ValidationError);
  }

  SUBCASE("runner failures carry the frame index") {
    try {
      bench([](const ImageRGB8&) { throw std::runtime_error("boom"); }, frames, 0);
      FAIL("expected propagation");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("frame 0") != std::string::npos);
    }
  }
}

TEST_CASE("table rendering reproduces the committed fixture rows") {
  auto bundle = load_bundle_json(std::filesystem::path(REEFFORGE_FIXTURE_DIR) /
                                 "tables_bundle.json");
  auto tables = render_tables(bundle);

  // headline model row, verbatim
  CHECK(tables.csv_models.find("YOLOv10-L,264.1,3.2,0.657,0.430") != std::string::npos);
  CHECK(tables.csv_models.find("YOLOv10-N,54.9,9.2,0.458,0.234") != std::string::npos);
  CHECK(tables.csv_models.find("YOLOv10-X,375.2,2.3,0.642,0.424") != std::string::npos);

  // ablation pairs
  CHECK(tables.text.find("YOLOv10-L (S) 0.657/0.430 vs (R) 0.638/0.478") !=
        std::string::npos);
  CHECK(tables.csv_ablation.find("YOLOv10-B,0.645,0.416,0.639,0.472") != std::string::npos);

  SUBCASE("rendering is deterministic") {
    auto again = render_tables(bundle);
    CHECK(again.text == tables.text);
    CHECK(again.csv_models == tables.csv_models);
    CHECK(again.csv_ablation == tables.csv_ablation);
  }

  SUBCASE("single model without ablation omits the second table") {
    ReportBundle solo;
    solo.models = {{"YOLOv10-N", {54.9, 9.2, 0.458, 0.234}}};
    auto t = render_tables(solo);
    CHECK(t.csv_ablation.empty());
    CHECK(t.text.find("(S)") == std::string::npos);
  }

  SUBCASE("mismatched ablation keys are rejected") {
    ReportBundle bad = bundle;
    bad.ablation_real[0].first = "YOLOv10-Z";
    CHECK_THROWS_AS(render_tables(bad), ValidationError);
  }
}

TEST_CASE("detections json round trip and validation") {
  auto dir = std::filesystem::temp_directory_path() / "reefforge_test_eval";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  std::vector<Detection> dets{det("scene_0001", 1.5, 2.5, 20.0, 30.0, 0.75)};
  save_detections_json(dets, dir / "pred.json");
  auto back = load_detections_json(dir / "pred.json");
  REQUIRE(back.size() == 1);
  CHECK(back[0].image_id == "scene_0001");
  CHECK(back[0].box.x_min == 1.5);
  CHECK(back[0].confidence == 0.75);

  SUBCASE("confidence outside [0,1] rejected") {
    write_text_file_atomic(dir / "bad.json",
                           R"([{"image_id":"a","x_min":0,"y_min":0,"x_max":1,"y_max":1,)"
                           R"("confidence":1.5,"class_id":0}])");
    CHECK_THROWS_AS(load_detections_json(dir / "bad.json"), ParseError);
  }
  SUBCASE("degenerate box rejected") {
    write_text_file_atomic(dir / "bad2.json",
                           R"([{"image_id":"a","x_min":5,"y_min":0,"x_max":5,"y_max":1,)"
                           R"("confidence":0.5,"class_id":0}])");
    CHECK_THROWS_AS(load_detections_json(dir / "bad2.json"), ValidationError);
  }
}

TEST_CASE("yolo ground truth loading converts to pixel boxes") {
  auto dir = std::filesystem::temp_directory_path() / "reefforge_test_gtyolo";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "labels");
  write_text_file_atomic(dir / "labels" / "img1.txt", "0 0.500000 0.500000 0.250000 0.100000\n");
  write_text_file_atomic(dir / "index.json", R"({"img1": [640, 480]})");

  auto gts = load_ground_truth_yolo(dir / "labels", dir / "index.json");
  REQUIRE(gts.size() == 1);
  CHECK(gts[0].image_id == "img1");
  CHECK(gts[0].box.x_min == doctest::Approx(0.375 * 640));
  CHECK(gts[0].box.x_max == doctest::Approx(0.625 * 640));
  CHECK(gts[0].box.y_min == doctest::Approx(0.45 * 480));
  CHECK(gts[0].box.y_max == doctest::Approx(0.55 * 480));

  SUBCASE("missing size index entry is a parse error") {
    write_text_file_atomic(dir / "labels" / "img2.txt", "0 0.5 0.5 0.1 0.1\n");
    CHECK_THROWS_AS(load_ground_truth_yolo(dir / "labels", dir / "index.json"), ParseError);
  }
}
