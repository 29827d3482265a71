#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "reefforge/rasterizer.hpp"

namespace reefforge::synthclient {

// Conditioning request for the diffusion backend: the render's paired depth
// and mask encodings, exactly four style-reference images, prompt pair,
// seed and strength.
struct SynthesisRequest {
  std::vector<uint8_t> depth_png;
  std::vector<uint8_t> mask_png;
  std::vector<std::vector<uint8_t>> reference_images;  // exactly 4
  std::string positive_prompt;
  std::string negative_prompt;
  uint64_t seed = 0;
  double denoise_strength = 0.6;  // [0, 1]
  int width = 0;
  int height = 0;
  std::string scene_ref;
};

void validate_request(const SynthesisRequest& request);

struct SynthesisResult {
  std::vector<uint8_t> image_png;
  std::string request_digest;
  std::string backend_id;
  double elapsed_ms = 0.0;
  std::string scene_ref;  // carried from the request: labels must come from this mask
};

// Canonical content hash of a request ("fnv1a64:<hex>"); bookkeeping for the
// pairing invariant, not a cryptographic digest.
std::string request_digest(const SynthesisRequest& request);

struct PromptConfig {
  std::string positive =
      "photo of a dense wild oyster reef on the seabed, turbid green water, "
      "natural light falloff, underwater survey photo";
  std::string negative =
      "cartoon, painting, text, watermark, fish, diver, hands, blurry frame edges";
  double denoise_strength = 0.6;
  double max_depth_m = 3.0;  // depth-encoding range for the conditioning image
  bool depth_near_bright = true;
};

/// Draws 4 distinct reference images from the pool (seeded, uniform without
/// replacement) and packages the render's depth/mask pair. Pool must hold at
/// least 4 images.
SynthesisRequest build_request(const rasterizer::RenderOutput& render,
                               const std::vector<std::vector<uint8_t>>& real_pool,
                               const PromptConfig& prompts, uint64_t seed);

/// Same contract over already-encoded conditioning bytes (the pipeline stores
/// the pair as PNGs between stages; conditioning on those exact bytes keeps
/// the pairing verifiable end-to-end).
SynthesisRequest build_request(std::vector<uint8_t> depth_png, std::vector<uint8_t> mask_png,
                               std::string scene_ref,
                               const std::vector<std::vector<uint8_t>>& real_pool,
                               const PromptConfig& prompts, uint64_t seed);

class SynthesisBackend {
 public:
  virtual ~SynthesisBackend() = default;
  virtual SynthesisResult run(const SynthesisRequest& request) = 0;
  virtual std::string id() const = 0;
};

/// Deterministic in-process stand-in for the diffusion service: colorizes the
/// depth conditioning through a green-brown underwater ramp, darkens instance
/// boundaries, overlays seed-hashed low-frequency noise on the foreground.
/// Pure function of the request bytes.
class MockBackend final : public SynthesisBackend {
 public:
  enum class Fault { none, wrong_size, error_status };

  explicit MockBackend(Fault fault = Fault::none) : fault_(fault) {}
  SynthesisResult run(const SynthesisRequest& request) override;
  std::string id() const override { return "mock-v1"; }

 private:
  Fault fault_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{1000};

  // wait before retry k (0-based): base * 2^k
  std::chrono::milliseconds wait_for(int retry) const {
    return backoff_base * (1LL << retry);
  }
};

/// HTTP client for the POST /synthesize contract (multipart: depth, mask,
/// ref0..ref3, params JSON). Transport failures are retried per policy with
/// exponential backoff; a non-success status is terminal and carries the
/// server's error message.
class HttpBackend final : public SynthesisBackend {
 public:
  explicit HttpBackend(std::string base_url, RetryPolicy retry = {},
                       std::chrono::seconds timeout = std::chrono::seconds(120));
  SynthesisResult run(const SynthesisRequest& request) override;
  std::string id() const override { return "http:" + base_url_; }

 private:
  std::string base_url_;
  RetryPolicy retry_;
  std::chrono::seconds timeout_;
};

/// Validates the request, runs the backend, and enforces the response
/// contract: returned image dimensions must equal the request output size
/// (mismatch is a protocol error — silent resizing would desynchronize the
/// image from its ground-truth mask).
SynthesisResult synthesize(const SynthesisRequest& request, SynthesisBackend& backend);

}  // namespace reefforge::synthclient
