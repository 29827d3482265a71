#pragma once

#include <cstdint>
#include <vector>

#include "reefforge/image.hpp"

namespace reefforge {

struct PngInfo {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int channels = 0;
};

// All encoders are deterministic: fixed filter/compression settings, no
// ancillary chunks that embed timestamps.
std::vector<uint8_t> encode_png(const ImageGray16& img);
std::vector<uint8_t> encode_png(const ImageRGB8& img);

// Header-only peek (IHDR); cheap dimension validation for wire payloads.
PngInfo probe_png(const std::vector<uint8_t>& bytes);

// Decoders are strict: the stored format must match (16-bit gray / 8-bit RGB).
ImageGray16 decode_png_gray16(const std::vector<uint8_t>& bytes);
ImageRGB8 decode_png_rgb8(const std::vector<uint8_t>& bytes);

}  // namespace reefforge
