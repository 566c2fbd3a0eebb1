#pragma once

#include <string>

#include "c2c/png_io.hpp"

namespace c2c {

inline constexpr int kGlyphW = 5;
inline constexpr int kGlyphH = 7;

// Returns 7 strings of 5 chars ('X' = on) or nullptr for unknown characters,
// which render as blanks.
const char* const* glyph_rows(char c);

struct RGB {
  uint8_t r = 0, g = 0, b = 0;

  bool operator==(const RGB&) const = default;
};

void draw_text(ImageRGB& img, int x, int y, const std::string& text, RGB color, int scale = 1);

// Pixel width of rendered text (glyphs plus 1-px gaps, scaled).
int text_width(const std::string& text, int scale = 1);

}  // namespace c2c
