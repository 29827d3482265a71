#include "reefforge/rasterizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "reefforge/errors.hpp"
#include "reefforge/oystermesh.hpp"
#include "reefforge/png_io.hpp"

namespace reefforge::rasterizer {

namespace {

// camera-space triangle with its projected vertices and shading value
struct ScreenTriangle {
  Vec3 cam[3];   // camera space, z = optical-axis depth
  double u[3];   // projected pixel x
  double v[3];   // projected pixel y
  uint32_t id;
  float shade;   // flat Lambert term for the preview
};

struct FragmentBuffers {
  DepthMap depth;
  InstanceMask mask;
  std::vector<float> shade;
};

double edge(double ax, double ay, double bx, double by, double px, double py) {
  return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// Sutherland-Hodgman against z >= near
size_t clip_near(const Vec3 (&in)[3], double near_z, Vec3 (&out)[4]) {
  size_t n = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec3& a = in[i];
    const Vec3& b = in[(i + 1) % 3];
    bool a_in = a.z >= near_z;
    bool b_in = b.z >= near_z;
    if (a_in) out[n++] = a;
    if (a_in != b_in) {
      double t = (near_z - a.z) / (b.z - a.z);
      out[n++] = a + (b - a) * t;
    }
  }
  return n;
}

void raster_band(const std::vector<ScreenTriangle>& tris, const scenegen::CameraModel& cam,
                 int row_begin, int row_end, FragmentBuffers& fb) {
  const int w = cam.width;
  for (const auto& t : tris) {
    double min_u = std::min({t.u[0], t.u[1], t.u[2]});
    double max_u = std::max({t.u[0], t.u[1], t.u[2]});
    double min_v = std::min({t.v[0], t.v[1], t.v[2]});
    double max_v = std::max({t.v[0], t.v[1], t.v[2]});

    int x0 = std::max(0, static_cast<int>(std::floor(min_u - 0.5)));
    int x1 = std::min(w - 1, static_cast<int>(std::ceil(max_u - 0.5)));
    int y0 = std::max(row_begin, static_cast<int>(std::floor(min_v - 0.5)));
    int y1 = std::min(row_end - 1, static_cast<int>(std::ceil(max_v - 0.5)));
    if (x0 > x1 || y0 > y1) continue;

    double area = edge(t.u[0], t.v[0], t.u[1], t.v[1], t.u[2], t.v[2]);
    if (area == 0.0) continue;
    double inv_area = 1.0 / area;

    for (int py = y0; py <= y1; ++py) {
      double sy = py + 0.5;
      for (int px = x0; px <= x1; ++px) {
        double sx = px + 0.5;
        double w0 = edge(t.u[1], t.v[1], t.u[2], t.v[2], sx, sy);
        double w1 = edge(t.u[2], t.v[2], t.u[0], t.v[0], sx, sy);
        double w2 = edge(t.u[0], t.v[0], t.u[1], t.v[1], sx, sy);
        // accept both windings: culling is off, shells are thin
        bool pos = w0 >= 0 && w1 >= 0 && w2 >= 0;
        bool neg = w0 <= 0 && w1 <= 0 && w2 <= 0;
        if (!pos && !neg) continue;

        // perspective-correct depth: 1/z is affine in screen space
        double l0 = w0 * inv_area, l1 = w1 * inv_area, l2 = w2 * inv_area;
        double inv_z = l0 / t.cam[0].z + l1 / t.cam[1].z + l2 / t.cam[2].z;
        if (inv_z <= 0.0) continue;
        float z = static_cast<float>(1.0 / inv_z);

        float& zb = fb.depth.at(px, py);
        if (z < zb) {
          zb = z;
          fb.mask.at(px, py) = t.id;
          fb.shade[static_cast<size_t>(py) * w + px] = t.shade;
        }
      }
    }
  }
}

void shade_preview(const Rect2& ground_extent, const scenegen::CameraModel& cam,
                   const FragmentBuffers& fb, ImageRGB8& img) {
  // ground plane z=0 shaded analytically, in the preview only
  RigidTransform cam_to_world = cam.pose.inverse();
  const Vec3 origin = cam_to_world.translation;
  const uint8_t water[3] = {24, 58, 66};
  const uint8_t seabed[3] = {96, 88, 62};

  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      uint8_t* px = img.px(x, y);
      uint32_t id = fb.mask.at(x, y);
      if (id != 0) {
        auto base = instance_color(id);
        float s = fb.shade[static_cast<size_t>(y) * cam.width + x];
        for (int c = 0; c < 3; ++c)
          px[c] = static_cast<uint8_t>(std::min(255.0f, base[static_cast<size_t>(c)] * s));
        continue;
      }
      // ray through the pixel center, world frame
      Vec3 dir_cam{(x + 0.5 - cam.cx) / cam.fx, (y + 0.5 - cam.cy) / cam.fy, 1.0};
      Vec3 dir = cam_to_world.rotation * dir_cam;
      bool hit_ground = false;
      if (dir.z < 0 && origin.z > 0) {
        double s = -origin.z / dir.z;
        Vec2 g{origin.x + s * dir.x, origin.y + s * dir.y};
        if (ground_extent.contains(g)) hit_ground = true;
      }
      const uint8_t* c = hit_ground ? seabed : water;
      px[0] = c[0];
      px[1] = c[1];
      px[2] = c[2];
    }
  }
}

}  // namespace

void validate_output(const RenderOutput& out) {
  if (out.depth.width != out.mask.width || out.depth.height != out.mask.height)
    throw ValidationError("render output: depth/mask dimensions differ");
  for (size_t i = 0; i < out.depth.data.size(); ++i) {
    bool finite = std::isfinite(out.depth.data[i]);
    if (finite && out.depth.data[i] <= 0.0f)
      throw ValidationError("render output: finite depth must be positive");
    if (finite != (out.mask.data[i] != 0))
      throw ValidationError("render output: mask/depth pixel alignment violated");
  }
}

RenderOutput render(const scenegen::ScenePlacement& scene,
                    const scenegen::CameraModel& camera, const RenderOptions& options) {
  std::vector<RawInstance> raw;
  raw.reserve(scene.instances.size());
  for (const auto& inst : scene.instances) {
    auto mesh = oystermesh::extrude_layers(oystermesh::perimeter_2d(inst.params), inst.params);
    for (auto& v : mesh.vertices) v = v * options.mesh_scale;  // cm -> m
    mesh.instance_id = inst.instance_id;
    raw.push_back({std::move(mesh), inst.pose});
  }
  return render_raw(raw, camera, options, scene.ground_extent);
}

RenderOutput render_raw(const std::vector<RawInstance>& instances,
                        const scenegen::CameraModel& camera, const RenderOptions& options,
                        const Rect2& ground_extent) {
  scenegen::validate_camera(camera);
  if (options.near_plane_m <= 0) throw ValidationError("render: near plane must be > 0");
  if (options.threads < 1) throw ValidationError("render: threads must be >= 1");

  // gather clipped, projected triangles once; bands rasterize them in order
  std::vector<ScreenTriangle> tris;
  const Vec3 light = normalized({0.35, 0.25, 0.9});
  for (const auto& inst : instances) {
    const auto& mesh = inst.mesh;
    for (const auto& tri : mesh.triangles) {
      Vec3 world[3], cam_v[3];
      for (int k = 0; k < 3; ++k) {
        world[k] = inst.pose.apply(mesh.vertices[tri[static_cast<size_t>(k)]]);
        cam_v[k] = camera.pose.apply(world[k]);
      }
      Vec3 n = cross(world[1] - world[0], world[2] - world[0]);
      double nn = norm(n);
      float shade =
          nn > 0 ? static_cast<float>(0.35 + 0.65 * std::abs(dot(n, light)) / nn) : 0.35f;

      Vec3 clipped[4];
      size_t count = clip_near(cam_v, options.near_plane_m, clipped);
      for (size_t k = 2; k < count; ++k) {
        ScreenTriangle st;
        st.cam[0] = clipped[0];
        st.cam[1] = clipped[k - 1];
        st.cam[2] = clipped[k];
        for (int j = 0; j < 3; ++j) {
          st.u[j] = camera.fx * (st.cam[j].x / st.cam[j].z) + camera.cx;
          st.v[j] = camera.fy * (st.cam[j].y / st.cam[j].z) + camera.cy;
        }
        st.id = mesh.instance_id;
        st.shade = shade;
        tris.push_back(st);
      }
    }
  }

  FragmentBuffers fb{DepthMap::background(camera.width, camera.height),
                     InstanceMask::background(camera.width, camera.height),
                     std::vector<float>(
                         static_cast<size_t>(camera.width) * camera.height, 0.0f)};

  // fixed row bands; disjoint rows make the result thread-count invariant
  constexpr int kBandRows = 16;
  int num_bands = (camera.height + kBandRows - 1) / kBandRows;
  auto run_band = [&](int band) {
    int row_begin = band * kBandRows;
    int row_end = std::min(camera.height, row_begin + kBandRows);
    raster_band(tris, camera, row_begin, row_end, fb);
  };
  int workers = std::min(options.threads, num_bands);
  if (workers <= 1) {
    for (int b = 0; b < num_bands; ++b) run_band(b);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (int b = next.fetch_add(1); b < num_bands; b = next.fetch_add(1)) run_band(b);
      });
    for (auto& th : pool) th.join();
  }

  RenderOutput out;
  if (options.make_preview) {
    ImageRGB8 img = ImageRGB8::filled(camera.width, camera.height, 0, 0, 0);
    shade_preview(ground_extent, camera, fb, img);
    out.preview = std::move(img);
  }
  out.depth = std::move(fb.depth);
  out.mask = std::move(fb.mask);
  return out;
}

std::vector<uint8_t> encode_depth_png(const DepthMap& depth, double max_depth_m,
                                      bool near_bright) {
  if (max_depth_m <= 0) throw ValidationError("encode_depth_png: max_depth must be > 0");
  ImageGray16 img = ImageGray16::zero(depth.width, depth.height);
  for (size_t i = 0; i < depth.data.size(); ++i) {
    float d = depth.data[i];
    if (!std::isfinite(d)) {
      img.data[i] = near_bright ? 0 : 65535;
      continue;
    }
    double t = std::clamp(static_cast<double>(d) / max_depth_m, 0.0, 1.0);
    double v = near_bright ? 65535.0 * (1.0 - t) : 65535.0 * t;
    img.data[i] = static_cast<uint16_t>(std::lround(v));
  }
  return encode_png(img);
}

MaskPng encode_mask_png(const InstanceMask& mask) {
  ImageGray16 raw = ImageGray16::zero(mask.width, mask.height);
  for (size_t i = 0; i < mask.data.size(); ++i) {
    if (mask.data[i] > 65535)
      throw CapacityError("encode_mask_png: instance id " + std::to_string(mask.data[i]) +
                          " exceeds the 16-bit channel");
    raw.data[i] = static_cast<uint16_t>(mask.data[i]);
  }
  ImageRGB8 rgb{mask.width, mask.height,
                std::vector<uint8_t>(static_cast<size_t>(mask.width) * mask.height * 3)};
  for (size_t i = 0; i < mask.data.size(); ++i) {
    auto c = instance_color(mask.data[i]);
    rgb.data[i * 3] = c[0];
    rgb.data[i * 3 + 1] = c[1];
    rgb.data[i * 3 + 2] = c[2];
  }
  return {encode_png(raw), encode_png(rgb)};
}

InstanceMask decode_mask_png(const std::vector<uint8_t>& raw16_png) {
  ImageGray16 img = decode_png_gray16(raw16_png);
  InstanceMask mask{img.width, img.height,
                    std::vector<uint32_t>(img.data.begin(), img.data.end())};
  return mask;
}

std::array<uint8_t, 3> instance_color(uint32_t id) {
  if (id == 0) return {0, 0, 0};
  // golden-ratio hue walk, fixed saturation/value
  double h = std::fmod(static_cast<double>(id) * 0.6180339887498949, 1.0) * 6.0;
  double s = 0.62, v = 0.95;
  double c = v * s;
  double x = c * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
  double m = v - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  auto to8 = [m](double t) {
    return static_cast<uint8_t>(std::lround(std::clamp((t + m) * 255.0, 0.0, 255.0)));
  };
  return {to8(r), to8(g), to8(b)};
}

}  // namespace reefforge::rasterizer
