#include "reefforge/oystermesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <utility>

#include "reefforge/errors.hpp"
#include "reefforge/fsio.hpp"
#include "reefforge/rng.hpp"

namespace reefforge::oystermesh {

namespace {

constexpr double kMinTriangleAreaCm2 = 1e-9;
constexpr uint64_t kRoughnessStream = 0x726f756768ULL;  // "rough"

double shoelace_area(const std::vector<Vec2>& ring) {
  double a = 0.0;
  for (size_t i = 0; i < ring.size(); ++i) {
    const Vec2& p = ring[i];
    const Vec2& q = ring[(i + 1) % ring.size()];
    a += cross(p, q);
  }
  return 0.5 * a;
}

Vec2 area_centroid(const std::vector<Vec2>& ring, double signed_area) {
  double cx = 0.0, cy = 0.0;
  for (size_t i = 0; i < ring.size(); ++i) {
    const Vec2& p = ring[i];
    const Vec2& q = ring[(i + 1) % ring.size()];
    double w = cross(p, q);
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  double f = 1.0 / (6.0 * signed_area);
  return {cx * f, cy * f};
}

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  double v = cross(b - a, c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  int o1 = orientation(p1, p2, q1);
  int o2 = orientation(p1, p2, q2);
  int o3 = orientation(q1, q2, p1);
  int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

// ring = closed polyline without the closing repeat
bool is_simple_polygon(const std::vector<Vec2>& ring) {
  size_t n = ring.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      // skip adjacent segments (they share an endpoint)
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

}  // namespace

namespace {

void validate_layer_fields(const OysterParams& params) {
  if (params.num_layers < 2) throw ValidationError("oyster params: num_layers must be >= 2");
  if (params.layer_profile.size() != static_cast<size_t>(params.num_layers))
    throw ValidationError("oyster params: layer_profile must have num_layers entries");
  for (size_t i = 0; i < params.layer_profile.size(); ++i) {
    const auto& lp = params.layer_profile[i];
    if (lp.scale <= 0.0 || lp.scale > 1.0)
      throw ValidationError("oyster params: layer scale must be in (0, 1]");
    if (i > 0 && lp.depth_offset <= params.layer_profile[i - 1].depth_offset)
      throw ValidationError("oyster params: layer depth offsets must be strictly increasing");
  }
  if (params.roughness_amp < 0)
    throw ValidationError("oyster params: roughness_amp must be >= 0");
}

}  // namespace

void validate_params(const OysterParams& params) {
  if (params.length_cm <= 0 || params.width_cm <= 0 || params.height_cm <= 0)
    throw ValidationError("oyster params: dimensions must be positive");
  validate_layer_fields(params);
  if (params.top_controls.size() < 4 || params.bottom_controls.size() < 4)
    throw ValidationError("oyster params: each half needs at least 4 control points");
  if (!(params.top_controls.front() == params.bottom_controls.front()) ||
      !(params.top_controls.back() == params.bottom_controls.back()))
    throw ValidationError(
        "oyster params: shell halves must share first and last control points");
  if (params.samples_per_perimeter < 8)
    throw ValidationError("oyster params: samples_per_perimeter must be >= 8");
}

OysterParams scale_params(OysterParams params, double s) {
  if (s <= 0) throw ValidationError("scale_params: scale must be positive");
  params.length_cm *= s;
  params.width_cm *= s;
  params.height_cm *= s;
  for (auto& lp : params.layer_profile) lp.depth_offset *= s;
  params.roughness_amp *= s;
  return params;
}

void validate_mesh(const TriangleMesh& mesh) {
  if (mesh.instance_id < 1) throw ValidationError("mesh: instance_id must be >= 1");
  for (const auto& tri : mesh.triangles) {
    for (uint32_t idx : tri)
      if (idx >= mesh.vertices.size())
        throw ValidationError("mesh: triangle index out of range");
    double area = triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                mesh.vertices[tri[2]]);
    if (area < kMinTriangleAreaCm2) throw GeometryError("mesh: degenerate triangle");
  }
}

bool is_closed(const TriangleMesh& mesh) {
  std::map<std::pair<uint32_t, uint32_t>, int> edges;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      uint32_t a = tri[static_cast<size_t>(e)];
      uint32_t b = tri[static_cast<size_t>((e + 1) % 3)];
      edges[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  return std::all_of(edges.begin(), edges.end(),
                     [](const auto& kv) { return kv.second == 2; });
}

double mesh_volume(const TriangleMesh& mesh) {
  double v = 0.0;
  for (const auto& tri : mesh.triangles)
    v += dot(mesh.vertices[tri[0]], cross(mesh.vertices[tri[1]], mesh.vertices[tri[2]]));
  return v / 6.0;
}

std::vector<Vec2> perimeter_2d(const OysterParams& params) {
  validate_params(params);
  const size_t m = static_cast<size_t>(params.samples_per_perimeter);

  auto top = splinecore::sample_curve(
      splinecore::BSplineCurve2D::clamped(params.top_controls, 3), m);
  auto bottom = splinecore::sample_curve(
      splinecore::BSplineCurve2D::clamped(params.bottom_controls, 3), m);

  // top hinge->bill, then bottom reversed with the bill sample dropped;
  // the final bottom sample is the hinge again: 2m-1 stored, front == back
  std::vector<Vec2> poly;
  poly.reserve(2 * m - 1);
  poly.insert(poly.end(), top.begin(), top.end());
  for (size_t j = m - 1; j-- > 0;) poly.push_back(bottom[j]);

  std::vector<Vec2> ring(poly.begin(), poly.end() - 1);
  double area = shoelace_area(ring);
  if (std::abs(area) < 1e-12)
    throw ValidationError("perimeter: control points enclose no area (degenerate outline)");

  double min_x = ring[0].x, max_x = ring[0].x, min_y = ring[0].y, max_y = ring[0].y;
  for (const auto& p : ring) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  double ex = max_x - min_x;
  double ey = max_y - min_y;
  if (ex <= 0 || ey <= 0)
    throw ValidationError("perimeter: outline collapses to a line");

  double sx = params.length_cm / ex;
  double sy = params.width_cm / ey;
  double cx = 0.5 * (min_x + max_x);
  double cy = 0.5 * (min_y + max_y);
  for (auto& p : poly) {
    p.x = (p.x - cx) * sx;
    p.y = (p.y - cy) * sy;
  }
  return poly;
}

TriangleMesh extrude_layers(const std::vector<Vec2>& perimeter, const OysterParams& params) {
  validate_layer_fields(params);
  if (perimeter.size() < 4 || !(perimeter.front() == perimeter.back()))
    throw GeometryError("extrude: perimeter must be a closed polyline (front == back)");

  std::vector<Vec2> ring(perimeter.begin(), perimeter.end() - 1);
  if (!is_simple_polygon(ring)) throw GeometryError("extrude: perimeter self-intersects");

  double area = shoelace_area(ring);
  if (std::abs(area) < 1e-12) throw GeometryError("extrude: perimeter encloses no area");
  if (area < 0) {  // normalize to counterclockwise so winding below is outward
    std::reverse(ring.begin(), ring.end());
    area = -area;
  }
  Vec2 c2 = area_centroid(ring, area);

  const size_t layers = params.layer_profile.size();
  const size_t P = ring.size();
  TriangleMesh mesh;
  mesh.vertices.reserve(layers * P + 2);
  for (size_t l = 0; l < layers; ++l) {
    double s = params.layer_profile[l].scale;
    double z = params.layer_profile[l].depth_offset;
    for (size_t j = 0; j < P; ++j) {
      Vec2 p = c2 + (ring[j] - c2) * s;
      mesh.vertices.push_back({p.x, p.y, z});
    }
  }
  const uint32_t bottom_center = static_cast<uint32_t>(mesh.vertices.size());
  mesh.vertices.push_back({c2.x, c2.y, params.layer_profile.front().depth_offset});
  const uint32_t top_center = static_cast<uint32_t>(mesh.vertices.size());
  mesh.vertices.push_back({c2.x, c2.y, params.layer_profile.back().depth_offset});

  if (params.roughness_amp > 0.0) {
    Rng rng(Rng::derive(params.seed, kRoughnessStream));
    for (auto& v : mesh.vertices) {
      v.x += params.roughness_amp * rng.uniform_real(-1.0, 1.0);
      v.y += params.roughness_amp * rng.uniform_real(-1.0, 1.0);
      v.z += params.roughness_amp * rng.uniform_real(-1.0, 1.0);
    }
  }

  auto idx = [P](size_t layer, size_t j) {
    return static_cast<uint32_t>(layer * P + (j % P));
  };
  for (size_t l = 0; l + 1 < layers; ++l) {
    for (size_t j = 0; j < P; ++j) {
      uint32_t a = idx(l, j), b = idx(l, j + 1);
      uint32_t cc = idx(l + 1, j + 1), d = idx(l + 1, j);
      mesh.triangles.push_back({a, b, cc});
      mesh.triangles.push_back({a, cc, d});
    }
  }
  for (size_t j = 0; j < P; ++j) {
    mesh.triangles.push_back({bottom_center, idx(0, j + 1), idx(0, j)});
    mesh.triangles.push_back({top_center, idx(layers - 1, j), idx(layers - 1, j + 1)});
  }

  validate_mesh(mesh);
  return mesh;
}

OysterRanges OysterRanges::defaults() {
  OysterRanges r;
  r.top_template = {{0.0, 0.0}, {0.12, 0.30}, {0.45, 0.46}, {0.82, 0.28}, {1.0, 0.0}};
  r.bottom_template = {{0.0, 0.0}, {0.18, -0.26}, {0.52, -0.42}, {0.85, -0.24}, {1.0, 0.0}};
  return r;
}

void validate_ranges(const OysterRanges& ranges) {
  auto check = [](const Range& r, const char* name, bool positive) {
    if (r.min > r.max)
      throw ValidationError(std::string("oyster ranges: ") + name + ": min > max");
    if (positive && r.min <= 0)
      throw ValidationError(std::string("oyster ranges: ") + name + " must be positive");
  };
  check(ranges.length_cm, "length_cm", true);
  check(ranges.width_cm, "width_cm", true);
  check(ranges.height_cm, "height_cm", true);
  check(ranges.roughness_amp, "roughness_amp", false);
  if (ranges.roughness_amp.min < 0)
    throw ValidationError("oyster ranges: roughness_amp must be >= 0");
  if (ranges.num_layers_min > ranges.num_layers_max || ranges.num_layers_min < 2)
    throw ValidationError("oyster ranges: num_layers range malformed");
  if (ranges.samples_min > ranges.samples_max || ranges.samples_min < 8)
    throw ValidationError("oyster ranges: samples range malformed");
  if (ranges.control_jitter < 0)
    throw ValidationError("oyster ranges: control_jitter must be >= 0");
  if (ranges.top_template.size() < 4 || ranges.bottom_template.size() < 4)
    throw ValidationError("oyster ranges: templates need at least 4 control points");
  if (!(ranges.top_template.front() == ranges.bottom_template.front()) ||
      !(ranges.top_template.back() == ranges.bottom_template.back()))
    throw ValidationError("oyster ranges: templates must share first and last points");
}

OysterParams random_oyster(uint64_t seed, const OysterRanges& ranges) {
  validate_ranges(ranges);
  Rng rng(seed);

  OysterParams p;
  p.seed = seed;
  p.length_cm = rng.uniform_real(ranges.length_cm.min, ranges.length_cm.max);
  p.width_cm = rng.uniform_real(ranges.width_cm.min, ranges.width_cm.max);
  p.height_cm = rng.uniform_real(ranges.height_cm.min, ranges.height_cm.max);
  p.num_layers = static_cast<int>(rng.uniform_int(ranges.num_layers_min, ranges.num_layers_max));
  p.samples_per_perimeter =
      static_cast<int>(rng.uniform_int(ranges.samples_min, ranges.samples_max));
  p.roughness_amp = rng.uniform_real(ranges.roughness_amp.min, ranges.roughness_amp.max);

  // shell bulge: 1.0 at mid-height tapering to 0.35 at the caps
  p.layer_profile.resize(static_cast<size_t>(p.num_layers));
  for (int i = 0; i < p.num_layers; ++i) {
    double tau = static_cast<double>(i) / static_cast<double>(p.num_layers - 1);
    double s = 0.35 + 0.65 * std::pow(std::sin(kPi * tau), 0.7);
    p.layer_profile[static_cast<size_t>(i)] = {std::min(s, 1.0), p.height_cm * tau};
  }

  auto jitter_half = [&](const std::vector<Vec2>& tmpl) {
    std::vector<Vec2> out = tmpl;
    for (size_t i = 1; i + 1 < out.size(); ++i) {
      out[i].x += rng.uniform_real(-ranges.control_jitter, ranges.control_jitter);
      out[i].y += rng.uniform_real(-ranges.control_jitter, ranges.control_jitter);
    }
    return out;
  };
  p.top_controls = jitter_half(ranges.top_template);
  p.bottom_controls = jitter_half(ranges.bottom_template);

  validate_params(p);
  return p;
}

std::string to_obj(const TriangleMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 32 + mesh.triangles.size() * 16);
  char buf[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
    out += buf;
  }
  for (const auto& t : mesh.triangles) {
    std::snprintf(buf, sizeof buf, "f %u %u %u\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out += buf;
  }
  return out;
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  write_text_file_atomic(path, to_obj(mesh));
}

}  // namespace reefforge::oystermesh
