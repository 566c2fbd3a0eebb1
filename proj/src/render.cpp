#include "c2c/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "c2c/errors.hpp"

namespace c2c {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

void set_px(ImageRGB& img, int x, int y, RGB c) {
  if (!img.in_bounds(x, y)) return;
  uint8_t* p = img.px(x, y);
  p[0] = c.r;
  p[1] = c.g;
  p[2] = c.b;
}

void dashed_hline(ImageRGB& img, int y, RGB c) {
  if (y < 0 || y >= img.h) return;
  for (int x = 0; x < img.w; ++x)
    if (x % 8 < 4) set_px(img, x, y, c);
}

void circle_outline(ImageRGB& img, int cx, int cy, double r, RGB c) {
  const int e = static_cast<int>(std::ceil(r)) + 1;
  for (int dy = -e; dy <= e; ++dy)
    for (int dx = -e; dx <= e; ++dx)
      if (std::abs(std::sqrt(double(dx) * dx + double(dy) * dy) - r) <= 0.5)
        set_px(img, cx + dx, cy + dy, c);
}

void square_outline(ImageRGB& img, int cx, int cy, double r, RGB c) {
  const int e = static_cast<int>(std::lround(r));
  for (int d = -e; d <= e; ++d) {
    set_px(img, cx + d, cy - e, c);
    set_px(img, cx + d, cy + e, c);
    set_px(img, cx - e, cy + d, c);
    set_px(img, cx + e, cy + d, c);
  }
}

void border_rect(ImageRGB& img, int thickness, RGB c) {
  for (int t = 0; t < thickness; ++t) {
    for (int x = 0; x < img.w; ++x) {
      set_px(img, x, t, c);
      set_px(img, x, img.h - 1 - t, c);
    }
    for (int y = 0; y < img.h; ++y) {
      set_px(img, t, y, c);
      set_px(img, img.w - 1 - t, y, c);
    }
  }
}

ImageRGB gray_to_rgb(const Array2<uint8_t>& g) {
  ImageRGB img(g.w, g.h);
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x) {
      const uint8_t v = g(x, y);
      set_px(img, x, y, {v, v, v});
    }
  return img;
}

}  // namespace

RGB tissue_color(Tissue t) {
  switch (t) {
    case Tissue::muscle: return {255, 0, 0};
    case Tissue::imat: return {0, 0, 255};
    case Tissue::vat: return {0, 255, 0};
    case Tissue::sat: return {255, 255, 0};
  }
  return {255, 255, 255};
}

RGB level_color(Level l) {
  switch (l) {
    case Level::T12: return {255, 0, 255};
    case Level::L1: return {0, 255, 255};
    case Level::L2: return {255, 165, 0};
    case Level::L3: return {255, 255, 0};
    case Level::L4: return {0, 255, 0};
    case Level::L5: return {255, 255, 255};
  }
  return {255, 255, 255};
}

uint8_t window_hu(double hu, double window, double level) {
  const double low = level - window / 2.0;
  double t = (hu - low) / window;
  t = std::clamp(t, 0.0, 1.0);
  return static_cast<uint8_t>(std::lround(t * 255.0));
}

Array2<uint8_t> window_image(const Array2<float>& hu, double window, double level) {
  Array2<uint8_t> out(hu.w, hu.h);
  for (size_t i = 0; i < hu.v.size(); ++i) out.v[i] = window_hu(hu.v[i], window, level);
  return out;
}

ImageRGB render_cpr(const CTVolume& volume, const CprPath& path,
                    const std::vector<CprAnnotation>& annotations, const OverlayStyle& style,
                    CprPlane plane) {
  const Array2<float> base = sample_cpr(volume, path, plane);
  ImageRGB img = gray_to_rgb(window_image(base, style.cpr_window, style.cpr_level));
  const int nz = volume.nz();

  for (const auto& a : annotations)
    dashed_hline(img, nz - 1 - round_half_away(a.si_center_z), level_color(a.level));

  for (const auto& a : annotations) {
    const int row = nz - 1 - round_half_away(a.roi_center.z);
    const int col =
        round_half_away(plane == CprPlane::coronal ? a.roi_center.x : a.roi_center.y);
    if (a.shape == RoiShape::sphere)
      circle_outline(img, col, row, a.roi_radius_px, level_color(a.level));
    else
      square_outline(img, col, row, a.roi_radius_px, level_color(a.level));
  }

  int ty = 2;
  for (const auto& a : annotations) {
    const std::string line = std::string(level_name(a.level)) + " " + fmt("%.1f", a.hu_statistic);
    draw_text(img, img.w - text_width(line) - 2, ty, line, level_color(a.level));
    ty += kGlyphH + 2;
  }
  return img;
}

std::vector<std::string> format_metrics_lines(const std::vector<TissueMetrics>& metrics) {
  std::vector<std::string> out;
  for (const auto& m : metrics) {
    std::string line = std::string(tissue_name(m.tissue)) + " " + fmt("%.2f", m.area_cm2) + " cm2";
    if (m.mean_hu) line += " " + fmt("%.1f", *m.mean_hu) + " HU";
    out.push_back(line);
  }
  return out;
}

ImageRGB render_axial_overlay(const Array2<float>& hu_slice, const TissueMasks& masks,
                              const std::vector<TissueMetrics>& metrics,
                              std::optional<Level> level, const OverlayStyle& style) {
  if (style.alpha <= 0.0 || style.alpha > 1.0) fail(Err::UsageError, "alpha out of (0,1]");
  ImageRGB img = gray_to_rgb(window_image(hu_slice, style.axial_window, style.axial_level));

  const double a = style.alpha;
  for (Tissue t : kTissues) {
    auto it = masks.find(t);
    if (it == masks.end()) continue;
    const RGB c = tissue_color(t);
    for (int y = 0; y < hu_slice.h; ++y)
      for (int x = 0; x < hu_slice.w; ++x) {
        if (!it->second(x, y)) continue;
        uint8_t* p = img.px(x, y);
        p[0] = static_cast<uint8_t>(std::lround((1.0 - a) * p[0] + a * c.r));
        p[1] = static_cast<uint8_t>(std::lround((1.0 - a) * p[1] + a * c.g));
        p[2] = static_cast<uint8_t>(std::lround((1.0 - a) * p[2] + a * c.b));
      }
  }

  if (level) {
    border_rect(img, 2, level_color(*level));
    draw_text(img, 4, 4, level_name(*level), level_color(*level), 2);
  }

  int ty = 4;
  for (const auto& line : format_metrics_lines(metrics)) {
    draw_text(img, img.w - text_width(line) - 4, ty, line, {255, 255, 255});
    ty += kGlyphH + 2;
  }
  return img;
}

}  // namespace c2c
