#pragma once

#include <cstdint>
#include <vector>

#include "c2c/grid.hpp"

namespace c2c {

struct Component2D {
  int label = 0;  // label id in the output label image, 1-based
  long long area = 0;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  bool touches_border = false;
};

// Label the nonzero pixels of `fg` with 4- or 8-connectivity. The output
// label image uses 0 for background and 1..n for components, assigned in
// raster-scan order of first encounter (deterministic).
std::vector<Component2D> label_components_2d(const Array2<uint8_t>& fg, int connectivity,
                                             Array2<int32_t>& labels_out);

}  // namespace c2c
