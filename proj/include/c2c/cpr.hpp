#pragma once

#include <vector>

#include "c2c/types.hpp"

namespace c2c {

enum class CprPlane { sagittal, coronal };

struct CprPath {
  // One sample per output row, top row first (superior). Monotone in z.
  std::vector<Vec3> samples;
  std::vector<Vec3> control_points;
};

// Piecewise-linear path through the centers (given superior to inferior),
// one sample per integer z of a volume with nz slices, extended straight
// (constant x, y) beyond the first and last center.
CprPath build_cpr_path(const std::vector<Vec3>& centers, int nz);

float trilinear_sample(const Array3<float>& a, double x, double y, double z);

// Image along the path: horizontal axis is volume x (coronal) or y
// (sagittal), one row per path sample.
Array2<float> sample_cpr(const CTVolume& volume, const CprPath& path, CprPlane plane);

}  // namespace c2c
