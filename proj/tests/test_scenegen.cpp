#include <doctest.h>

#include <cmath>
#include <set>

#include "reefforge/errors.hpp"
#include "reefforge/scenegen.hpp"

using namespace reefforge;
using namespace reefforge::scenegen;

TEST_CASE("place_oysters basics") {
  Rect2 region{-0.5, -0.5, 0.5, 0.5};

  SUBCASE("empty scene is valid") {
    auto scene = place_oysters(0, region, 1, 0.0);
    CHECK(scene.instances.empty());
  }

  SUBCASE("ids are consecutive and centers stay inside the region") {
    auto scene = place_oysters(50, region, 7, 0.0);
    REQUIRE(scene.instances.size() == 50);
    for (size_t i = 0; i < scene.instances.size(); ++i) {
      const auto& inst = scene.instances[i];
      CHECK(inst.instance_id == i + 1);
      CHECK(region.contains({inst.pose.translation.x, inst.pose.translation.y}));
      CHECK(inst.pose.rotation.orthonormality_defect() < 1e-9);
    }
  }

  SUBCASE("unsatisfiable packing raises a capacity error") {
    Rect2 tiny{0.0, 0.0, 0.1, 0.1};
    CHECK_THROWS_AS(place_oysters(10, tiny, 3, 0.5), CapacityError);
  }

  SUBCASE("min_spacing is honored") {
    auto scene = place_oysters(12, region, 11, 0.2);
    for (size_t i = 0; i < scene.instances.size(); ++i)
      for (size_t j = i + 1; j < scene.instances.size(); ++j) {
        Vec3 a = scene.instances[i].pose.translation;
        Vec3 b = scene.instances[j].pose.translation;
        CHECK(norm(Vec2{a.x - b.x, a.y - b.y}) >= 0.2);
      }
  }

  SUBCASE("deterministic per seed") {
    auto a = place_oysters(8, region, 21, 0.05);
    auto b = place_oysters(8, region, 21, 0.05);
    REQUIRE(a.instances.size() == b.instances.size());
    for (size_t i = 0; i < a.instances.size(); ++i) {
      CHECK(a.instances[i].pose.translation == b.instances[i].pose.translation);
      CHECK(a.instances[i].pose.rotation.m == b.instances[i].pose.rotation.m);
      CHECK(a.instances[i].params.length_cm == b.instances[i].params.length_cm);
    }
  }

  SUBCASE("zero-area region rejected") {
    CHECK_THROWS_AS(place_oysters(1, Rect2{0, 0, 0, 1}, 1, 0.0), ValidationError);
  }
}

TEST_CASE("sample_camera") {
  CameraRanges ranges;

  SUBCASE("zero tilt points the optical axis exactly at nadir") {
    ranges.tilt_deg = {0.0, 0.0};
    ranges.height_m = {0.7, 0.7};
    auto cam = sample_camera(5, ranges);
    // optical axis in world coords = third row of world->camera rotation
    Vec3 axis{cam.pose.rotation(2, 0), cam.pose.rotation(2, 1), cam.pose.rotation(2, 2)};
    CHECK(std::abs(axis.x) < 1e-12);
    CHECK(std::abs(axis.y) < 1e-12);
    CHECK(std::abs(axis.z + 1.0) < 1e-12);
  }

  SUBCASE("repeat seed reproduces the camera") {
    auto a = sample_camera(9, ranges);
    auto b = sample_camera(9, ranges);
    CHECK(a.pose.rotation.m == b.pose.rotation.m);
    CHECK(a.pose.translation == b.pose.translation);
  }

  SUBCASE("sampled tilts recovered from the rotation stay in range") {
    ranges.tilt_deg = {10.0, 25.0};
    for (uint64_t seed = 0; seed < 500; ++seed) {
      auto cam = sample_camera(seed, ranges);
      Vec3 axis{cam.pose.rotation(2, 0), cam.pose.rotation(2, 1), cam.pose.rotation(2, 2)};
      double tilt = rad_to_deg(std::acos(-axis.z));
      CHECK(tilt >= 10.0 - 1e-9);
      CHECK(tilt <= 25.0 + 1e-9);
    }
  }

  SUBCASE("camera sits at the sampled height above the look center") {
    ranges.tilt_deg = {0.0, 0.0};
    ranges.height_m = {0.8, 0.8};
    auto cam = sample_camera(17, ranges);
    RigidTransform cam_to_world = cam.pose.inverse();
    CHECK(std::abs(cam_to_world.translation.z - 0.8) < 1e-12);
  }

  SUBCASE("malformed ranges rejected") {
    ranges.tilt_deg = {30.0, 10.0};
    CHECK_THROWS_AS(sample_camera(1, ranges), ValidationError);
  }
}

TEST_CASE("camera validation catches bad models") {
  CameraModel cam;
  cam.pose = RigidTransform::identity();
  CHECK_NOTHROW(validate_camera(cam));
  SUBCASE("negative focal length") {
    cam.fx = -1;
    CHECK_THROWS_AS(validate_camera(cam), ValidationError);
  }
  SUBCASE("principal point outside") {
    cam.cx = 2000;
    CHECK_THROWS_AS(validate_camera(cam), ValidationError);
  }
  SUBCASE("non-orthonormal rotation") {
    cam.pose.rotation(0, 0) = 2.0;
    CHECK_THROWS_AS(validate_camera(cam), ValidationError);
  }
}

TEST_CASE("rigid transforms round-trip") {
  Rng rng(31337);
  for (int i = 0; i < 50; ++i) {
    RigidTransform t;
    t.rotation = Mat3::rot_z(rng.uniform_real(0, 6.28)) *
                 Mat3::rot_y(rng.uniform_real(-1, 1)) * Mat3::rot_x(rng.uniform_real(-1, 1));
    t.translation = {rng.uniform_real(-5, 5), rng.uniform_real(-5, 5),
                     rng.uniform_real(-5, 5)};
    Vec3 p{rng.uniform_real(-2, 2), rng.uniform_real(-2, 2), rng.uniform_real(-2, 2)};
    Vec3 back = t.inverse().apply(t.apply(p));
    CHECK(std::abs(back.x - p.x) < 1e-9);
    CHECK(std::abs(back.y - p.y) < 1e-9);
    CHECK(std::abs(back.z - p.z) < 1e-9);
  }
}

TEST_CASE("scene json round trip") {
  auto scene = place_oysters(5, Rect2{-1, -1, 1, 1}, 99, 0.1);
  auto camera = sample_camera(99, CameraRanges{});
  SceneDoc doc;
  doc.scene_id = "scene_0042";
  doc.placement = scene;
  doc.camera = camera;
  doc.config_echo = "scenes: 1\nseed: 99\n";

  std::string text = scene_to_json(doc);
  SceneDoc back = scene_from_json(text);

  CHECK(back.scene_id == doc.scene_id);
  CHECK(back.placement.seed == doc.placement.seed);
  CHECK(back.rng.name == Rng::kAlgorithm);
  REQUIRE(back.placement.instances.size() == 5);
  for (size_t i = 0; i < 5; ++i) {
    const auto& a = doc.placement.instances[i];
    const auto& b = back.placement.instances[i];
    CHECK(a.instance_id == b.instance_id);
    CHECK(a.pose.rotation.m == b.pose.rotation.m);
    CHECK(a.pose.translation == b.pose.translation);
    CHECK(a.params.length_cm == b.params.length_cm);
    CHECK(a.params.top_controls == b.params.top_controls);
    CHECK(a.params.layer_profile.size() == b.params.layer_profile.size());
  }
  CHECK(back.camera.fx == camera.fx);
  CHECK(back.camera.pose.rotation.m == camera.pose.rotation.m);
  CHECK(back.config_echo == doc.config_echo);

  // serialization is stable (reproducibility record)
  CHECK(scene_to_json(back) == text);

  CHECK_THROWS_AS(scene_from_json("{not json"), ParseError);
}
