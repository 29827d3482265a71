#pragma once

#include <cstdint>
#include <vector>

namespace reefforge {

// Interleaved RGB, row-major, 3 bytes per pixel.
struct ImageRGB8 {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  static ImageRGB8 filled(int w, int h, uint8_t r, uint8_t g, uint8_t b) {
    ImageRGB8 img{w, h, std::vector<uint8_t>(static_cast<size_t>(w) * h * 3)};
    for (size_t i = 0; i < img.data.size(); i += 3) {
      img.data[i] = r;
      img.data[i + 1] = g;
      img.data[i + 2] = b;
    }
    return img;
  }

  uint8_t* px(int x, int y) { return &data[(static_cast<size_t>(y) * width + x) * 3]; }
  const uint8_t* px(int x, int y) const {
    return &data[(static_cast<size_t>(y) * width + x) * 3];
  }
};

// Single-channel 16-bit, row-major, host-endian in memory.
struct ImageGray16 {
  int width = 0;
  int height = 0;
  std::vector<uint16_t> data;

  static ImageGray16 zero(int w, int h) {
    return {w, h, std::vector<uint16_t>(static_cast<size_t>(w) * h, 0)};
  }

  uint16_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  uint16_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

}  // namespace reefforge
