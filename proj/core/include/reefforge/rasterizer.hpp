#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "reefforge/image.hpp"
#include "reefforge/scenegen.hpp"

namespace reefforge::rasterizer {

// Per-pixel distance along the camera optical axis, meters. Background is
// +infinity (the non-finite sentinel); every finite value is > 0.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  static DepthMap background(int w, int h) {
    return {w, h,
            std::vector<float>(static_cast<size_t>(w) * h,
                               std::numeric_limits<float>::infinity())};
  }
  float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  float& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
};

// 0 = background, k >= 1 = instance k.
struct InstanceMask {
  int width = 0;
  int height = 0;
  std::vector<uint32_t> data;

  static InstanceMask background(int w, int h) {
    return {w, h, std::vector<uint32_t>(static_cast<size_t>(w) * h, 0)};
  }
  uint32_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  uint32_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
};

// Invariant (kept by render, checked by validate_output): at every pixel,
// mask nonzero <=> depth finite.
struct RenderOutput {
  DepthMap depth;
  InstanceMask mask;
  std::optional<ImageRGB8> preview;
  std::string scene_ref;
};

void validate_output(const RenderOutput& out);

struct RenderOptions {
  double near_plane_m = 0.05;
  int threads = 1;        // row-band parallelism; output is thread-count invariant
  bool make_preview = true;
  double mesh_scale = 0.01;  // oyster meshes are cm; scenes are meters
};

/// Z-buffer rasterization of every instance mesh under a pinhole projection.
/// Pixel-center sampling, no anti-aliasing (AA would corrupt the instance
/// ids), back-face culling disabled, triangles clipped polygon-exact against
/// the near plane. Pure function of (scene, camera, options); byte-identical
/// across runs and thread counts.
///
/// The optional preview flat-shades the oysters over an analytic ground
/// plane; the ground never enters depth or mask (it would break the
/// mask<=>depth pairing the downstream labels rely on).
RenderOutput render(const scenegen::ScenePlacement& scene,
                    const scenegen::CameraModel& camera, const RenderOptions& options = {});

// Pre-posed meshes in meters; mask ids come from each mesh's instance_id.
struct RawInstance {
  oystermesh::TriangleMesh mesh;  // meters
  RigidTransform pose;            // mesh -> world
};

/// Mesh-level entry point behind render(); takes arbitrary geometry (used
/// directly by tests and debugging tools).
RenderOutput render_raw(const std::vector<RawInstance>& instances,
                        const scenegen::CameraModel& camera,
                        const RenderOptions& options = {}, const Rect2& ground_extent = {});

/// Linear 16-bit depth encoding: round(65535 * (1 - clamp(d / max_depth, 0, 1)))
/// when near_bright (default; background -> 0), or the complement when
/// far-bright (background -> 65535).
std::vector<uint8_t> encode_depth_png(const DepthMap& depth, double max_depth_m,
                                      bool near_bright = true);

struct MaskPng {
  std::vector<uint8_t> raw16;  // ids verbatim; lossless round trip
  std::vector<uint8_t> rgb;    // fixed palette visualization, background black
};

/// ids above 65535 do not fit the 16-bit channel -> capacity error.
MaskPng encode_mask_png(const InstanceMask& mask);

InstanceMask decode_mask_png(const std::vector<uint8_t>& raw16_png);

// Deterministic id -> color (golden-ratio hue walk); id 0 is black.
std::array<uint8_t, 3> instance_color(uint32_t id);

}  // namespace reefforge::rasterizer
