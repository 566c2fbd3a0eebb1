#pragma once

#include <vector>

#include "c2c/types.hpp"

namespace c2c {

// Not-a-knot cubic spline through y at integer knots 0..n-1, evaluated at xs.
// Degenerate inputs interpolate exactly: n=1 constant, n=2 linear, n=3 the
// unique quadratic. Positions outside [0, n-1] extrapolate the end segment.
std::vector<double> spline_eval_1d(const std::vector<double>& y, const std::vector<double>& xs);

// Resamples every axis to min(sx, sy, sz) with cubic splines. The sample
// grid stays inside the original physical extent (it can shrink by less than
// one voxel at the far edge, never grow).
CTVolume resample_isotropic(const CTVolume& volume);

}  // namespace c2c
