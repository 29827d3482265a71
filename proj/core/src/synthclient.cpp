#include "reefforge/synthclient.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "reefforge/errors.hpp"
#include "reefforge/png_io.hpp"
#include "reefforge/rng.hpp"

namespace reefforge::synthclient {

using nlohmann::json;

namespace {

constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_bytes(uint64_t& h, const void* data, size_t n) {
  const auto* p = static_cast<const uint8_t*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void fnv_u64(uint64_t& h, uint64_t v) {
  uint8_t buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<uint8_t>(v >> (8 * i));
  fnv_bytes(h, buf, 8);
}

std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

// seed-hashed lattice for the mock's low-frequency noise
double lattice_noise(uint64_t seed, int cell_x, int cell_y) {
  uint64_t h = kFnvOffset;
  fnv_u64(h, seed);
  fnv_u64(h, static_cast<uint64_t>(static_cast<int64_t>(cell_x)));
  fnv_u64(h, static_cast<uint64_t>(static_cast<int64_t>(cell_y)));
  return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;  // [-1, 1)
}

}  // namespace

void validate_request(const SynthesisRequest& request) {
  if (request.reference_images.size() != 4)
    throw ValidationError("synthesis request: exactly 4 reference images required");
  if (request.denoise_strength < 0.0 || request.denoise_strength > 1.0)
    throw ValidationError("synthesis request: denoise_strength must be in [0, 1]");
  if (request.width <= 0 || request.height <= 0)
    throw ValidationError("synthesis request: output size must be positive");
  PngInfo d = probe_png(request.depth_png);
  PngInfo m = probe_png(request.mask_png);
  if (d.width != request.width || d.height != request.height || m.width != request.width ||
      m.height != request.height)
    throw ValidationError("synthesis request: depth/mask dimensions must equal output size");
}

std::string request_digest(const SynthesisRequest& request) {
  uint64_t h = kFnvOffset;
  fnv_u64(h, static_cast<uint64_t>(request.width));
  fnv_u64(h, static_cast<uint64_t>(request.height));
  fnv_u64(h, request.seed);
  uint64_t strength_bits;
  std::memcpy(&strength_bits, &request.denoise_strength, 8);
  fnv_u64(h, strength_bits);
  fnv_bytes(h, request.positive_prompt.data(), request.positive_prompt.size());
  fnv_bytes(h, request.negative_prompt.data(), request.negative_prompt.size());
  fnv_u64(h, request.depth_png.size());
  fnv_bytes(h, request.depth_png.data(), request.depth_png.size());
  fnv_u64(h, request.mask_png.size());
  fnv_bytes(h, request.mask_png.data(), request.mask_png.size());
  for (const auto& ref : request.reference_images) {
    fnv_u64(h, ref.size());
    fnv_bytes(h, ref.data(), ref.size());
  }
  return "fnv1a64:" + hex64(h);
}

SynthesisRequest build_request(std::vector<uint8_t> depth_png, std::vector<uint8_t> mask_png,
                               std::string scene_ref,
                               const std::vector<std::vector<uint8_t>>& real_pool,
                               const PromptConfig& prompts, uint64_t seed) {
  if (real_pool.size() < 4)
    throw ValidationError("build_request: reference pool must hold at least 4 images (got " +
                          std::to_string(real_pool.size()) + ")");
  SynthesisRequest req;
  req.depth_png = std::move(depth_png);
  req.mask_png = std::move(mask_png);
  PngInfo info = probe_png(req.depth_png);
  req.width = info.width;
  req.height = info.height;
  Rng rng(seed);
  for (size_t idx : rng.sample_distinct(real_pool.size(), 4))
    req.reference_images.push_back(real_pool[idx]);
  req.positive_prompt = prompts.positive;
  req.negative_prompt = prompts.negative;
  req.seed = seed;
  req.denoise_strength = prompts.denoise_strength;
  req.scene_ref = std::move(scene_ref);
  validate_request(req);
  return req;
}

SynthesisRequest build_request(const rasterizer::RenderOutput& render,
                               const std::vector<std::vector<uint8_t>>& real_pool,
                               const PromptConfig& prompts, uint64_t seed) {
  return build_request(rasterizer::encode_depth_png(render.depth, prompts.max_depth_m,
                                                    prompts.depth_near_bright),
                       rasterizer::encode_mask_png(render.mask).raw16, render.scene_ref,
                       real_pool, prompts, seed);
}

SynthesisResult MockBackend::run(const SynthesisRequest& request) {
  auto t0 = std::chrono::steady_clock::now();
  if (fault_ == Fault::error_status)
    throw BackendError("mock backend: injected failure");

  ImageGray16 depth = decode_png_gray16(request.depth_png);
  ImageGray16 mask = decode_png_gray16(request.mask_png);
  const int w = depth.width, h = depth.height;

  ImageRGB8 img{w, h, std::vector<uint8_t>(static_cast<size_t>(w) * h * 3)};
  const double water[3] = {35, 72, 64};
  const double far_c[3] = {52, 84, 58};
  const double near_c[3] = {158, 128, 92};
  const int cell = 80;  // low-frequency noise lattice pitch, px

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      size_t i = static_cast<size_t>(y) * w + x;
      double rgb[3];
      if (mask.data[i] == 0) {
        rgb[0] = water[0];
        rgb[1] = water[1];
        rgb[2] = water[2];
      } else {
        double t = depth.data[i] / 65535.0;  // near-bright conditioning
        for (int c = 0; c < 3; ++c) rgb[c] = far_c[c] + (near_c[c] - far_c[c]) * t;

        // darken instance boundaries
        uint16_t id = mask.data[i];
        bool boundary = (x > 0 && mask.at(x - 1, y) != id) ||
                        (x + 1 < w && mask.at(x + 1, y) != id) ||
                        (y > 0 && mask.at(x, y - 1) != id) ||
                        (y + 1 < h && mask.at(x, y + 1) != id);
        if (boundary)
          for (double& c : rgb) c *= 0.55;

        // bilinear value noise, foreground only (seed-dependent)
        int cx0 = x / cell, cy0 = y / cell;
        double fx = static_cast<double>(x % cell) / cell;
        double fy = static_cast<double>(y % cell) / cell;
        double n00 = lattice_noise(request.seed, cx0, cy0);
        double n10 = lattice_noise(request.seed, cx0 + 1, cy0);
        double n01 = lattice_noise(request.seed, cx0, cy0 + 1);
        double n11 = lattice_noise(request.seed, cx0 + 1, cy0 + 1);
        double noise = (n00 * (1 - fx) + n10 * fx) * (1 - fy) +
                       (n01 * (1 - fx) + n11 * fx) * fy;
        for (double& c : rgb) c *= 1.0 + 0.15 * noise;
      }
      for (int c = 0; c < 3; ++c)
        img.data[i * 3 + static_cast<size_t>(c)] =
            static_cast<uint8_t>(std::lround(std::clamp(rgb[c], 0.0, 255.0)));
    }
  }

  if (fault_ == Fault::wrong_size) {
    ImageRGB8 wrong = ImageRGB8::filled(w / 2 + 1, h / 2 + 1, 0, 0, 0);
    img = std::move(wrong);
  }

  SynthesisResult result;
  result.image_png = encode_png(img);
  result.request_digest = request_digest(request);
  result.backend_id = id();
  result.scene_ref = request.scene_ref;
  result.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  return result;
}

HttpBackend::HttpBackend(std::string base_url, RetryPolicy retry,
                         std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), retry_(retry), timeout_(timeout) {}

SynthesisResult HttpBackend::run(const SynthesisRequest& request) {
  auto t0 = std::chrono::steady_clock::now();

  json params{{"positive_prompt", request.positive_prompt},
              {"negative_prompt", request.negative_prompt},
              {"seed", request.seed},
              {"denoise_strength", request.denoise_strength},
              {"width", request.width},
              {"height", request.height}};

  httplib::MultipartFormDataItems items;
  auto part = [](std::string name, const std::vector<uint8_t>& bytes, std::string filename,
                 std::string type) {
    return httplib::MultipartFormData{std::move(name),
                                      std::string(bytes.begin(), bytes.end()),
                                      std::move(filename), std::move(type)};
  };
  items.push_back(part("depth", request.depth_png, "depth.png", "image/png"));
  items.push_back(part("mask", request.mask_png, "mask.png", "image/png"));
  for (size_t i = 0; i < request.reference_images.size(); ++i)
    items.push_back(part("ref" + std::to_string(i), request.reference_images[i],
                         "ref" + std::to_string(i) + ".png", "application/octet-stream"));
  items.push_back({"params", params.dump(), "params.json", "application/json"});

  std::string last_error;
  for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(retry_.wait_for(attempt - 1));

    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_.count(), 0);
    client.set_read_timeout(timeout_.count(), 0);
    client.set_write_timeout(timeout_.count(), 0);

    auto res = client.Post("/synthesize", items);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;  // transport failure: retry
    }
    if (res->status != 200) {
      std::string message = "status " + std::to_string(res->status);
      try {
        auto body = json::parse(res->body);
        if (body.contains("error")) message += ": " + body["error"].get<std::string>();
      } catch (const json::exception&) {
        // non-JSON error body; report the status alone
      }
      throw BackendError("backend: " + message);
    }
    SynthesisResult result;
    result.image_png.assign(res->body.begin(), res->body.end());
    result.backend_id = res->get_header_value("X-Backend-Id");
    if (result.backend_id.empty()) result.backend_id = id();
    result.request_digest = request_digest(request);
    result.scene_ref = request.scene_ref;
    result.elapsed_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    return result;
  }
  throw TransportError("backend unreachable after " + std::to_string(retry_.max_retries) +
                       " retries: " + base_url_ + " (" + last_error + ")");
}

SynthesisResult synthesize(const SynthesisRequest& request, SynthesisBackend& backend) {
  validate_request(request);
  SynthesisResult result = backend.run(request);
  PngInfo info = probe_png(result.image_png);
  if (info.width != request.width || info.height != request.height)
    throw ProtocolError("backend returned " + std::to_string(info.width) + "x" +
                        std::to_string(info.height) + ", request was " +
                        std::to_string(request.width) + "x" +
                        std::to_string(request.height) + " (refusing to resize)");
  return result;
}

}  // namespace reefforge::synthclient
