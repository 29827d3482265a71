#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "reefforge/geometry.hpp"
#include "reefforge/splinecore.hpp"

namespace reefforge::oystermesh {

struct LayerProfile {
  double scale = 1.0;       // (0, 1], cross-section scale about the perimeter centroid
  double depth_offset = 0.0;  // cm, strictly increasing across layers
};

// Shell-generation parameters. All dimensional fields are centimeters.
// The two control polygons describe the top and bottom halves of the 2D
// perimeter; they must share their first and last points (hinge and bill).
struct OysterParams {
  uint64_t seed = 0;
  double length_cm = 8.0;
  double width_cm = 6.0;
  double height_cm = 3.0;
  int num_layers = 8;
  std::vector<LayerProfile> layer_profile;
  std::vector<Vec2> top_controls;
  std::vector<Vec2> bottom_controls;
  int samples_per_perimeter = 48;
  double roughness_amp = 0.0;  // cm; 0 keeps geometry exact
};

void validate_params(const OysterParams& params);

// Multiplies every dimensional (cm) field by s: length, width, height,
// layer depth offsets, roughness amplitude.
OysterParams scale_params(OysterParams params, double s);

struct TriangleMesh {
  std::vector<Vec3> vertices;              // cm
  std::vector<std::array<uint32_t, 3>> triangles;
  uint32_t instance_id = 1;
};

// index bounds, non-degenerate areas (>= 1e-9 cm^2), instance_id >= 1
void validate_mesh(const TriangleMesh& mesh);

// every edge shared by exactly two triangles
bool is_closed(const TriangleMesh& mesh);

// signed volume via the divergence theorem, cm^3 (positive for outward winding)
double mesh_volume(const TriangleMesh& mesh);

/// Closed 2D shell outline: the top-half curve sampled at
/// samples_per_perimeter points followed by the bottom-half curve reversed,
/// scaled so the bounding extent is length_cm x width_cm and centered on the
/// origin.
///
/// Both halves are cubic B-splines over clamped knot vectors, so each curve
/// interpolates the shared hinge and bill control points and the loop closes
/// exactly. (splinecore also provides uniform knot vectors; a uniform curve
/// does not interpolate its end controls, which would leave a gap between
/// the halves, so the shell model pins the clamped convention.)
///
/// Point-count contract for m = samples_per_perimeter: the polyline stores
/// 2*m - 1 points; the bill sample is shared between the halves and the
/// hinge sample is repeated at the end, so front() == back() and 2*m - 2
/// points are distinct.
std::vector<Vec2> perimeter_2d(const OysterParams& params);

/// Stacks num_layers scaled copies of the perimeter at the layer depth
/// offsets, stitches adjacent rings with triangle strips and closes the
/// caps with triangle fans. Deterministic for fixed params; roughness_amp
/// adds a seeded vertex jitter.
TriangleMesh extrude_layers(const std::vector<Vec2>& perimeter, const OysterParams& params);

// Uniform sampling ranges for random_oyster. Control-point templates are the
// base outline; control_jitter perturbs interior control points in template
// units (endpoints stay shared between halves).
struct OysterRanges {
  Range length_cm{5.0, 12.0};
  Range width_cm{4.0, 9.0};
  Range height_cm{2.0, 4.5};
  Range roughness_amp{0.0, 0.0};
  int num_layers_min = 8;
  int num_layers_max = 8;
  int samples_min = 48;
  int samples_max = 48;
  double control_jitter = 0.05;
  std::vector<Vec2> top_template;
  std::vector<Vec2> bottom_template;

  static OysterRanges defaults();
};

void validate_ranges(const OysterRanges& ranges);

/// Draws OysterParams from the configured uniform ranges; pure function of
/// (seed, ranges). The layer schedule tapers from 1.0 at mid-height to 0.35
/// at the caps (the layer count and scale schedule are not derivable from
/// the ten-scan source data, so this is a documented stand-in).
OysterParams random_oyster(uint64_t seed, const OysterRanges& ranges);

// ASCII OBJ (v/f records only), for inspection in external tools
std::string to_obj(const TriangleMesh& mesh);
void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace reefforge::oystermesh
