#include "reefforge/scenegen.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "reefforge/errors.hpp"

namespace reefforge::scenegen {

using nlohmann::json;

namespace {

constexpr uint64_t kPoseStream = 0x706f7365ULL;    // "pose"
constexpr uint64_t kShapeStream = 0x73686170ULL;   // "shap"
constexpr double kOrthonormalityEps = 1e-9;

}  // namespace

void validate_camera(const CameraModel& camera) {
  if (camera.fx <= 0 || camera.fy <= 0)
    throw ValidationError("camera: focal lengths must be positive");
  if (camera.width <= 0 || camera.height <= 0)
    throw ValidationError("camera: image size must be positive");
  if (camera.cx < 0 || camera.cx >= camera.width || camera.cy < 0 ||
      camera.cy >= camera.height)
    throw ValidationError("camera: principal point outside image");
  if (camera.pose.rotation.orthonormality_defect() > kOrthonormalityEps)
    throw ValidationError("camera: rotation is not orthonormal");
  if (camera.pose.rotation.det() <= 0)
    throw ValidationError("camera: rotation must be proper (det +1)");
}

ScenePlacement place_oysters(size_t n, const Rect2& region, uint64_t seed,
                             double min_spacing_m, const PlacementConfig& config) {
  if (region.area() <= 0) throw ValidationError("place_oysters: region area must be > 0");
  if (min_spacing_m < 0) throw ValidationError("place_oysters: min_spacing must be >= 0");
  oystermesh::validate_ranges(config.oyster_ranges);

  ScenePlacement scene;
  scene.ground_extent = region;
  scene.seed = seed;

  Rng rng(Rng::derive(seed, kPoseStream));
  double max_tilt = deg_to_rad(config.max_tilt_deg);
  std::vector<Vec2> centers;
  centers.reserve(n);

  const uint64_t max_attempts = config.max_attempts_per_oyster * std::max<uint64_t>(n, 1);
  uint64_t attempts = 0;
  while (centers.size() < n) {
    if (attempts++ >= max_attempts)
      throw CapacityError(
          "place_oysters: could not satisfy min_spacing=" + std::to_string(min_spacing_m) +
          " m for " + std::to_string(n) + " oysters in a " + std::to_string(region.width()) +
          "x" + std::to_string(region.height()) + " m region after " +
          std::to_string(max_attempts) + " attempts");
    Vec2 c{rng.uniform_real(region.min_x, region.max_x),
           rng.uniform_real(region.min_y, region.max_y)};
    double yaw = rng.uniform_real(0.0, 2.0 * kPi);
    double roll = rng.uniform_real(-max_tilt, max_tilt);
    double pitch = rng.uniform_real(-max_tilt, max_tilt);

    bool ok = true;
    for (const auto& prev : centers) {
      if (norm(prev - c) < min_spacing_m) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    Instance inst;
    inst.instance_id = static_cast<uint32_t>(centers.size() + 1);
    inst.params = oystermesh::random_oyster(
        Rng::derive(seed, kShapeStream + centers.size()), config.oyster_ranges);
    inst.pose.rotation = Mat3::rot_z(yaw) * Mat3::rot_y(pitch) * Mat3::rot_x(roll);
    inst.pose.translation = {c.x, c.y, 0.0};
    scene.instances.push_back(std::move(inst));
    centers.push_back(c);
  }
  return scene;
}

CameraModel sample_camera(uint64_t seed, const CameraRanges& ranges) {
  if (ranges.height_m.min > ranges.height_m.max || ranges.height_m.min <= 0)
    throw ValidationError("camera ranges: height range malformed");
  if (ranges.tilt_deg.min > ranges.tilt_deg.max || ranges.tilt_deg.min < 0 ||
      ranges.tilt_deg.max >= 90.0)
    throw ValidationError("camera ranges: tilt range malformed");

  Rng rng(seed);
  double h = rng.uniform_real(ranges.height_m.min, ranges.height_m.max);
  double tilt = deg_to_rad(rng.uniform_real(ranges.tilt_deg.min, ranges.tilt_deg.max));
  double yaw = rng.uniform_real(0.0, 2.0 * kPi);

  // camera-to-world axes before yaw: forward dips `tilt` off the -z nadir
  double s = std::sin(tilt), c = std::cos(tilt);
  Vec3 forward{s, 0.0, -c};
  Vec3 right{c, 0.0, s};
  Vec3 down = cross(forward, right);  // (0, -1, 0)

  Mat3 yaw_rot = Mat3::rot_z(yaw);
  forward = yaw_rot * forward;
  right = yaw_rot * right;
  down = yaw_rot * down;

  // columns of camera->world rotation are the camera axes in world coords
  Mat3 cam_to_world{{right.x, down.x, forward.x,  //
                     right.y, down.y, forward.y,  //
                     right.z, down.z, forward.z}};
  Vec3 position{ranges.look_center_x, ranges.look_center_y, h};

  CameraModel cam;
  cam.fx = ranges.fx;
  cam.fy = ranges.fy;
  cam.cx = ranges.cx;
  cam.cy = ranges.cy;
  cam.width = ranges.width;
  cam.height = ranges.height;
  cam.pose.rotation = cam_to_world.transposed();
  cam.pose.translation = (cam.pose.rotation * position) * -1.0;
  validate_camera(cam);
  return cam;
}

namespace {

json transform_to_json(const RigidTransform& t) {
  // 4x4 row-major
  const Mat3& r = t.rotation;
  return json::array({r(0, 0), r(0, 1), r(0, 2), t.translation.x,  //
                      r(1, 0), r(1, 1), r(1, 2), t.translation.y,  //
                      r(2, 0), r(2, 1), r(2, 2), t.translation.z,  //
                      0.0, 0.0, 0.0, 1.0});
}

RigidTransform transform_from_json(const json& a) {
  if (!a.is_array() || a.size() != 16)
    throw ParseError("scene json: pose must be a 16-element row-major array");
  RigidTransform t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t.rotation(i, j) = a[static_cast<size_t>(i * 4 + j)];
  t.translation = {a[3].get<double>(), a[7].get<double>(), a[11].get<double>()};
  return t;
}

json vec2_list(const std::vector<Vec2>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back(json::array({p.x, p.y}));
  return out;
}

std::vector<Vec2> vec2_list_from(const json& a) {
  std::vector<Vec2> out;
  for (const auto& e : a) out.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
  return out;
}

json params_to_json(const oystermesh::OysterParams& p) {
  json scales = json::array(), offsets = json::array();
  for (const auto& lp : p.layer_profile) {
    scales.push_back(lp.scale);
    offsets.push_back(lp.depth_offset);
  }
  return json{{"seed", p.seed},
              {"length_cm", p.length_cm},
              {"width_cm", p.width_cm},
              {"height_cm", p.height_cm},
              {"num_layers", p.num_layers},
              {"layer_scales", scales},
              {"layer_offsets", offsets},
              {"top_controls", vec2_list(p.top_controls)},
              {"bottom_controls", vec2_list(p.bottom_controls)},
              {"samples_per_perimeter", p.samples_per_perimeter},
              {"roughness_amp", p.roughness_amp}};
}

oystermesh::OysterParams params_from_json(const json& j) {
  oystermesh::OysterParams p;
  p.seed = j.at("seed");
  p.length_cm = j.at("length_cm");
  p.width_cm = j.at("width_cm");
  p.height_cm = j.at("height_cm");
  p.num_layers = j.at("num_layers");
  const auto& scales = j.at("layer_scales");
  const auto& offsets = j.at("layer_offsets");
  if (scales.size() != offsets.size())
    throw ParseError("scene json: layer_scales/layer_offsets length mismatch");
  p.layer_profile.clear();
  for (size_t i = 0; i < scales.size(); ++i)
    p.layer_profile.push_back({scales[i].get<double>(), offsets[i].get<double>()});
  p.top_controls = vec2_list_from(j.at("top_controls"));
  p.bottom_controls = vec2_list_from(j.at("bottom_controls"));
  p.samples_per_perimeter = j.at("samples_per_perimeter");
  p.roughness_amp = j.at("roughness_amp");
  return p;
}

}  // namespace

std::string scene_to_json(const SceneDoc& doc) {
  json instances = json::array();
  for (const auto& inst : doc.placement.instances) {
    instances.push_back(json{{"instance_id", inst.instance_id},
                             {"world_from_local", transform_to_json(inst.pose)},
                             {"params", params_to_json(inst.params)}});
  }
  json j{
      {"schema", "reefforge.scene/1"},
      {"scene_id", doc.scene_id},
      {"seed", doc.placement.seed},
      {"rng", {{"name", doc.rng.name}, {"version", doc.rng.version}}},
      {"ground_extent",
       {{"min_x", doc.placement.ground_extent.min_x},
        {"min_y", doc.placement.ground_extent.min_y},
        {"max_x", doc.placement.ground_extent.max_x},
        {"max_y", doc.placement.ground_extent.max_y}}},
      {"camera",
       {{"fx", doc.camera.fx},
        {"fy", doc.camera.fy},
        {"cx", doc.camera.cx},
        {"cy", doc.camera.cy},
        {"width", doc.camera.width},
        {"height", doc.camera.height},
        {"camera_from_world", transform_to_json(doc.camera.pose)}}},
      {"instances", instances},
      {"config_echo", doc.config_echo},
  };
  return j.dump(2) + "\n";
}

SceneDoc scene_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene json: ") + e.what());
  }
  try {
    SceneDoc doc;
    doc.scene_id = j.at("scene_id");
    doc.placement.seed = j.at("seed");
    doc.rng.name = j.at("rng").at("name");
    doc.rng.version = j.at("rng").at("version");
    const auto& g = j.at("ground_extent");
    doc.placement.ground_extent = {g.at("min_x").get<double>(), g.at("min_y").get<double>(),
                                   g.at("max_x").get<double>(), g.at("max_y").get<double>()};
    const auto& c = j.at("camera");
    doc.camera.fx = c.at("fx");
    doc.camera.fy = c.at("fy");
    doc.camera.cx = c.at("cx");
    doc.camera.cy = c.at("cy");
    doc.camera.width = c.at("width");
    doc.camera.height = c.at("height");
    doc.camera.pose = transform_from_json(c.at("camera_from_world"));
    for (const auto& e : j.at("instances")) {
      Instance inst;
      inst.instance_id = e.at("instance_id");
      inst.pose = transform_from_json(e.at("world_from_local"));
      inst.params = params_from_json(e.at("params"));
      doc.placement.instances.push_back(std::move(inst));
    }
    doc.config_echo = j.value("config_echo", "");
    return doc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene json: ") + e.what());
  }
}

}  // namespace reefforge::scenegen
