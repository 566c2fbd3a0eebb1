#include "c2c/image_ops.hpp"

#include <stdexcept>

namespace c2c {

std::vector<Component2D> label_components_2d(const Array2<uint8_t>& fg, int connectivity,
                                             Array2<int32_t>& labels_out) {
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("connectivity must be 4 or 8");

  const int w = fg.w, h = fg.h;
  labels_out = Array2<int32_t>(w, h, 0);
  std::vector<Component2D> comps;
  std::vector<int> stack;
  stack.reserve(1024);

  static const int dx8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  static const int dy8[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static const int dx4[4] = {0, -1, 1, 0};
  static const int dy4[4] = {-1, 0, 0, 1};
  const int* dx = connectivity == 8 ? dx8 : dx4;
  const int* dy = connectivity == 8 ? dy8 : dy4;
  const int nd = connectivity;

  int next = 0;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      if (!fg(x0, y0) || labels_out(x0, y0)) continue;
      ++next;
      Component2D c;
      c.label = next;
      stack.push_back(y0 * w + x0);
      labels_out(x0, y0) = next;
      while (!stack.empty()) {
        int p = stack.back();
        stack.pop_back();
        int x = p % w, y = p / w;
        c.area++;
        c.centroid_x += x;
        c.centroid_y += y;
        if (x == 0 || x == w - 1 || y == 0 || y == h - 1) c.touches_border = true;
        for (int k = 0; k < nd; ++k) {
          int xn = x + dx[k], yn = y + dy[k];
          if (xn < 0 || xn >= w || yn < 0 || yn >= h) continue;
          if (!fg(xn, yn) || labels_out(xn, yn)) continue;
          labels_out(xn, yn) = next;
          stack.push_back(yn * w + xn);
        }
      }
      c.centroid_x /= static_cast<double>(c.area);
      c.centroid_y /= static_cast<double>(c.area);
      comps.push_back(c);
    }
  }
  return comps;
}

}  // namespace c2c
