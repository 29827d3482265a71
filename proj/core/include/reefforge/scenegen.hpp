#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reefforge/geometry.hpp"
#include "reefforge/oystermesh.hpp"
#include "reefforge/rng.hpp"

namespace reefforge::scenegen {

// Pinhole camera. pose maps world -> camera; camera frame is the usual CV
// convention (x right, y down, z forward along the optical axis).
struct CameraModel {
  double fx = 550.0;
  double fy = 550.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;
  RigidTransform pose;  // world -> camera
};

void validate_camera(const CameraModel& camera);

struct Instance {
  oystermesh::OysterParams params;
  RigidTransform pose;  // oyster local (meters) -> world
  uint32_t instance_id = 1;
};

struct ScenePlacement {
  std::vector<Instance> instances;
  Rect2 ground_extent;  // meters
  uint64_t seed = 0;
};

struct PlacementConfig {
  double max_tilt_deg = 15.0;  // roll/pitch magnitude bound
  uint64_t max_attempts_per_oyster = 1000;
  oystermesh::OysterRanges oyster_ranges = oystermesh::OysterRanges::defaults();
};

/// n oysters dropped on the ground plane by rejection sampling: uniform
/// position in `region`, uniform yaw, small random roll/pitch. Pairwise
/// center spacing >= min_spacing is enforced when satisfiable; after
/// 1000*n failed attempts (configurable) a capacity error names the
/// constraint. instance_ids run 1..n. Deterministic per seed.
ScenePlacement place_oysters(size_t n, const Rect2& region, uint64_t seed,
                             double min_spacing_m, const PlacementConfig& config = {});

struct CameraRanges {
  Range height_m{0.4, 1.0};
  Range tilt_deg{10.0, 25.0};  // angle off straight-down
  double fx = 550.0;
  double fy = 550.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;
  double look_center_x = 0.0;  // camera hovers above this ground point
  double look_center_y = 0.0;
};

/// AUV-style viewpoint: hovering above the scene at a sampled height, tilted
/// off nadir by a sampled angle, spun by a uniform yaw. tilt range [0,0]
/// yields an optical axis exactly antiparallel to the ground normal.
CameraModel sample_camera(uint64_t seed, const CameraRanges& ranges);

// Scene document: the canonical reproducibility record (JSON).
struct SceneDoc {
  std::string scene_id;
  ScenePlacement placement;
  CameraModel camera;
  RngId rng;
  std::string config_echo;  // flat key:value text of the generating config
};

std::string scene_to_json(const SceneDoc& doc);
SceneDoc scene_from_json(const std::string& text);

}  // namespace reefforge::scenegen
