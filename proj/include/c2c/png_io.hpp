#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace c2c {

struct ImageRGB {
  int w = 0;
  int h = 0;
  std::vector<uint8_t> v;  // 3 bytes per pixel, row-major

  ImageRGB() = default;
  ImageRGB(int w_, int h_) : w(w_), h(h_), v(static_cast<size_t>(w_) * h_ * 3, 0) {}

  uint8_t* px(int x, int y) { return v.data() + (static_cast<size_t>(y) * w + x) * 3; }
  const uint8_t* px(int x, int y) const { return v.data() + (static_cast<size_t>(y) * w + x) * 3; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < w && y >= 0 && y < h; }

  bool operator==(const ImageRGB&) const = default;
};

// 8-bit RGB PNG, filter "none" on every scanline; identical images encode to
// identical bytes.
std::vector<uint8_t> encode_png(const ImageRGB& img);
void write_png(const std::filesystem::path& path, const ImageRGB& img);
ImageRGB decode_png(const std::vector<uint8_t>& bytes);

}  // namespace c2c
