#include "c2c/font.hpp"

namespace c2c {

namespace {

struct Glyph {
  char ch;
  const char* rows[7];
};

// 5x7 bitmap glyphs; 'X' marks set pixels.
constexpr Glyph kGlyphs[] = {
    {' ', {"     ", "     ", "     ", "     ", "     ", "     ", "     "}},
    {'0', {" XXX ", "X   X", "X  XX", "X X X", "XX  X", "X   X", " XXX "}},
    {'1', {"  X  ", " XX  ", "  X  ", "  X  ", "  X  ", "  X  ", " XXX "}},
    {'2', {" XXX ", "X   X", "    X", "   X ", "  X  ", " X   ", "XXXXX"}},
    {'3', {" XXX ", "X   X", "    X", "  XX ", "    X", "X   X", " XXX "}},
    {'4', {"   X ", "  XX ", " X X ", "X  X ", "XXXXX", "   X ", "   X "}},
    {'5', {"XXXXX", "X    ", "XXXX ", "    X", "    X", "X   X", " XXX "}},
    {'6', {" XXX ", "X    ", "X    ", "XXXX ", "X   X", "X   X", " XXX "}},
    {'7', {"XXXXX", "    X", "   X ", "  X  ", " X   ", " X   ", " X   "}},
    {'8', {" XXX ", "X   X", "X   X", " XXX ", "X   X", "X   X", " XXX "}},
    {'9', {" XXX ", "X   X", "X   X", " XXXX", "    X", "    X", " XXX "}},
    {'A', {" XXX ", "X   X", "X   X", "XXXXX", "X   X", "X   X", "X   X"}},
    {'B', {"XXXX ", "X   X", "X   X", "XXXX ", "X   X", "X   X", "XXXX "}},
    {'C', {" XXX ", "X   X", "X    ", "X    ", "X    ", "X   X", " XXX "}},
    {'D', {"XXXX ", "X   X", "X   X", "X   X", "X   X", "X   X", "XXXX "}},
    {'E', {"XXXXX", "X    ", "X    ", "XXXX ", "X    ", "X    ", "XXXXX"}},
    {'F', {"XXXXX", "X    ", "X    ", "XXXX ", "X    ", "X    ", "X    "}},
    {'G', {" XXX ", "X   X", "X    ", "X XXX", "X   X", "X   X", " XXX "}},
    {'H', {"X   X", "X   X", "X   X", "XXXXX", "X   X", "X   X", "X   X"}},
    {'I', {" XXX ", "  X  ", "  X  ", "  X  ", "  X  ", "  X  ", " XXX "}},
    {'J', {"  XXX", "   X ", "   X ", "   X ", "   X ", "X  X ", " XX  "}},
    {'K', {"X   X", "X  X ", "X X  ", "XX   ", "X X  ", "X  X ", "X   X"}},
    {'L', {"X    ", "X    ", "X    ", "X    ", "X    ", "X    ", "XXXXX"}},
    {'M', {"X   X", "XX XX", "X X X", "X X X", "X   X", "X   X", "X   X"}},
    {'N', {"X   X", "XX  X", "X X X", "X  XX", "X   X", "X   X", "X   X"}},
    {'O', {" XXX ", "X   X", "X   X", "X   X", "X   X", "X   X", " XXX "}},
    {'P', {"XXXX ", "X   X", "X   X", "XXXX ", "X    ", "X    ", "X    "}},
    {'Q', {" XXX ", "X   X", "X   X", "X   X", "X X X", "X  X ", " XX X"}},
    {'R', {"XXXX ", "X   X", "X   X", "XXXX ", "X X  ", "X  X ", "X   X"}},
    {'S', {" XXXX", "X    ", "X    ", " XXX ", "    X", "    X", "XXXX "}},
    {'T', {"XXXXX", "  X  ", "  X  ", "  X  ", "  X  ", "  X  ", "  X  "}},
    {'U', {"X   X", "X   X", "X   X", "X   X", "X   X", "X   X", " XXX "}},
    {'V', {"X   X", "X   X", "X   X", "X   X", "X   X", " X X ", "  X  "}},
    {'W', {"X   X", "X   X", "X   X", "X X X", "X X X", "XX XX", "X   X"}},
    {'X', {"X   X", "X   X", " X X ", "  X  ", " X X ", "X   X", "X   X"}},
    {'Y', {"X   X", "X   X", " X X ", "  X  ", "  X  ", "  X  ", "  X  "}},
    {'Z', {"XXXXX", "    X", "   X ", "  X  ", " X   ", "X    ", "XXXXX"}},
    {'a', {"     ", "     ", " XXX ", "    X", " XXXX", "X   X", " XXXX"}},
    {'b', {"X    ", "X    ", "XXXX ", "X   X", "X   X", "X   X", "XXXX "}},
    {'c', {"     ", "     ", " XXX ", "X    ", "X    ", "X   X", " XXX "}},
    {'d', {"    X", "    X", " XXXX", "X   X", "X   X", "X   X", " XXXX"}},
    {'e', {"     ", "     ", " XXX ", "X   X", "XXXXX", "X    ", " XXX "}},
    {'f', {"  XX ", " X  X", " X   ", "XXX  ", " X   ", " X   ", " X   "}},
    {'g', {"     ", " XXXX", "X   X", "X   X", " XXXX", "    X", " XXX "}},
    {'h', {"X    ", "X    ", "XXXX ", "X   X", "X   X", "X   X", "X   X"}},
    {'i', {"  X  ", "     ", " XX  ", "  X  ", "  X  ", "  X  ", " XXX "}},
    {'j', {"   X ", "     ", "  XX ", "   X ", "   X ", "X  X ", " XX  "}},
    {'k', {"X    ", "X    ", "X  X ", "X X  ", "XX   ", "X X  ", "X  X "}},
    {'l', {" XX  ", "  X  ", "  X  ", "  X  ", "  X  ", "  X  ", " XXX "}},
    {'m', {"     ", "     ", "XX X ", "X X X", "X X X", "X X X", "X X X"}},
    {'n', {"     ", "     ", "XXXX ", "X   X", "X   X", "X   X", "X   X"}},
    {'o', {"     ", "     ", " XXX ", "X   X", "X   X", "X   X", " XXX "}},
    {'p', {"     ", "XXXX ", "X   X", "X   X", "XXXX ", "X    ", "X    "}},
    {'q', {"     ", " XXXX", "X   X", "X   X", " XXXX", "    X", "    X"}},
    {'r', {"     ", "     ", "X XX ", "XX  X", "X    ", "X    ", "X    "}},
    {'s', {"     ", "     ", " XXXX", "X    ", " XXX ", "    X", "XXXX "}},
    {'t', {" X   ", " X   ", "XXX  ", " X   ", " X   ", " X  X", "  XX "}},
    {'u', {"     ", "     ", "X   X", "X   X", "X   X", "X   X", " XXXX"}},
    {'v', {"     ", "     ", "X   X", "X   X", "X   X", " X X ", "  X  "}},
    {'w', {"     ", "     ", "X   X", "X   X", "X X X", "X X X", " X X "}},
    {'x', {"     ", "     ", "X   X", " X X ", "  X  ", " X X ", "X   X"}},
    {'y', {"     ", "X   X", "X   X", "X   X", " XXXX", "    X", " XXX "}},
    {'z', {"     ", "     ", "XXXXX", "   X ", "  X  ", " X   ", "XXXXX"}},
    {'.', {"     ", "     ", "     ", "     ", "     ", " XX  ", " XX  "}},
    {',', {"     ", "     ", "     ", "     ", " XX  ", "  X  ", " X   "}},
    {'-', {"     ", "     ", "     ", "XXXXX", "     ", "     ", "     "}},
    {'+', {"     ", "  X  ", "  X  ", "XXXXX", "  X  ", "  X  ", "     "}},
    {':', {"     ", " XX  ", " XX  ", "     ", " XX  ", " XX  ", "     "}},
    {'(', {"   X ", "  X  ", " X   ", " X   ", " X   ", "  X  ", "   X "}},
    {')', {" X   ", "  X  ", "   X ", "   X ", "   X ", "  X  ", " X   "}},
    {'/', {"    X", "    X", "   X ", "  X  ", " X   ", "X    ", "X    "}},
    {'%', {"XX  X", "XX X ", "  X  ", "  X  ", " X   ", "X  XX", "X  XX"}},
    {'=', {"     ", "     ", "XXXXX", "     ", "XXXXX", "     ", "     "}},
    {'_', {"     ", "     ", "     ", "     ", "     ", "     ", "XXXXX"}},
};

}  // namespace

const char* const* glyph_rows(char c) {
  for (const auto& g : kGlyphs)
    if (g.ch == c) return g.rows;
  return nullptr;
}

void draw_text(ImageRGB& img, int x, int y, const std::string& text, RGB color, int scale) {
  int cx = x;
  for (char c : text) {
    const char* const* rows = glyph_rows(c);
    if (rows) {
      for (int gy = 0; gy < kGlyphH; ++gy)
        for (int gx = 0; gx < kGlyphW; ++gx) {
          if (rows[gy][gx] != 'X') continue;
          for (int sy = 0; sy < scale; ++sy)
            for (int sx = 0; sx < scale; ++sx) {
              const int px = cx + gx * scale + sx;
              const int py = y + gy * scale + sy;
              if (!img.in_bounds(px, py)) continue;
              uint8_t* p = img.px(px, py);
              p[0] = color.r;
              p[1] = color.g;
              p[2] = color.b;
            }
        }
    }
    cx += (kGlyphW + 1) * scale;
  }
}

int text_width(const std::string& text, int scale) {
  if (text.empty()) return 0;
  return static_cast<int>(text.size()) * (kGlyphW + 1) * scale - scale;
}

}  // namespace c2c
