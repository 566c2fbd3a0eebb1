#include "c2c/resample.hpp"

#include <algorithm>
#include <cmath>

#include "c2c/errors.hpp"

namespace c2c {

namespace {

// Second derivatives M_i at the knots for a not-a-knot spline on a uniform
// grid. With h = 1 the boundary conditions collapse to closed forms:
// M_1 = y0 - 2*y1 + y2 and M_{n-2} likewise, leaving a strictly diagonally
// dominant tridiagonal system for the interior.
std::vector<double> spline_moments(const std::vector<double>& y) {
  const size_t n = y.size();
  std::vector<double> m(n, 0.0);
  if (n < 4) return m;  // handled by exact low-order interpolation

  m[1] = y[0] - 2.0 * y[1] + y[2];
  m[n - 2] = y[n - 3] - 2.0 * y[n - 2] + y[n - 1];

  const size_t k = n - 4;  // unknowns M_2 .. M_{n-3}
  if (k > 0) {
    std::vector<double> c(k, 0.0), d(k, 0.0);
    for (size_t i = 0; i < k; ++i) {
      const size_t j = i + 2;  // knot index
      d[i] = 6.0 * (y[j - 1] - 2.0 * y[j] + y[j + 1]);
    }
    d[0] -= m[1];
    d[k - 1] -= m[n - 2];
    // Thomas algorithm, constant stencil [1 4 1].
    double beta = 4.0;
    std::vector<double> gamma(k, 0.0);
    d[0] /= beta;
    for (size_t i = 1; i < k; ++i) {
      gamma[i] = 1.0 / beta;
      beta = 4.0 - gamma[i];
      d[i] = (d[i] - d[i - 1]) / beta;
    }
    for (size_t i = k - 1; i-- > 0;) d[i] -= gamma[i + 1] * d[i + 1];
    for (size_t i = 0; i < k; ++i) m[i + 2] = d[i];
  }

  m[0] = 2.0 * m[1] - m[2];
  m[n - 1] = 2.0 * m[n - 2] - m[n - 3];
  return m;
}

double eval_segment(const std::vector<double>& y, const std::vector<double>& m, double x) {
  const size_t n = y.size();
  int i = static_cast<int>(std::floor(x));
  i = std::clamp(i, 0, static_cast<int>(n) - 2);
  const double t = x - i;
  const double a = 1.0 - t;
  return m[static_cast<size_t>(i)] * a * a * a / 6.0 +
         m[static_cast<size_t>(i) + 1] * t * t * t / 6.0 +
         (y[static_cast<size_t>(i)] - m[static_cast<size_t>(i)] / 6.0) * a +
         (y[static_cast<size_t>(i) + 1] - m[static_cast<size_t>(i) + 1] / 6.0) * t;
}

}  // namespace

std::vector<double> spline_eval_1d(const std::vector<double>& y, const std::vector<double>& xs) {
  if (y.empty()) fail(Err::UsageError, "spline over empty data");
  const size_t n = y.size();
  std::vector<double> out(xs.size());
  if (n == 1) {
    std::fill(out.begin(), out.end(), y[0]);
    return out;
  }
  if (n == 2) {
    for (size_t i = 0; i < xs.size(); ++i) out[i] = y[0] + (y[1] - y[0]) * xs[i];
    return out;
  }
  if (n == 3) {
    // Unique quadratic through the three knots.
    const double c = y[0];
    const double a = (y[0] - 2.0 * y[1] + y[2]) / 2.0;
    const double b = y[1] - y[0] - a;
    for (size_t i = 0; i < xs.size(); ++i) out[i] = (a * xs[i] + b) * xs[i] + c;
    return out;
  }
  const auto m = spline_moments(y);
  for (size_t i = 0; i < xs.size(); ++i) out[i] = eval_segment(y, m, xs[i]);
  return out;
}

namespace {

// Resamples one axis of a float grid with the spline above. `axis` is 0/1/2
// for x/y/z; `ratio` = new_spacing / old_spacing in index units.
Array3<float> resample_axis(const Array3<float>& a, int axis, double ratio) {
  const int old_n = axis == 0 ? a.nx : axis == 1 ? a.ny : a.nz;
  const int new_n = static_cast<int>(std::floor((old_n - 1) / ratio)) + 1;
  if (new_n == old_n && std::abs(ratio - 1.0) < 1e-12) return a;

  std::vector<double> xs(static_cast<size_t>(new_n));
  for (int j = 0; j < new_n; ++j) xs[static_cast<size_t>(j)] = j * ratio;

  Array3<float> out(axis == 0 ? new_n : a.nx, axis == 1 ? new_n : a.ny,
                    axis == 2 ? new_n : a.nz);
  std::vector<double> line(static_cast<size_t>(old_n));
  std::vector<double> res;

  const int nu = axis == 0 ? a.ny : a.nx;
  const int nv = axis == 2 ? a.ny : a.nz;
  for (int v = 0; v < nv; ++v)
    for (int u = 0; u < nu; ++u) {
      for (int i = 0; i < old_n; ++i) {
        const int x = axis == 0 ? i : u;
        const int y = axis == 0 ? u : (axis == 1 ? i : v);
        const int z = axis == 2 ? i : v;
        line[static_cast<size_t>(i)] = a(x, y, z);
      }
      res = spline_eval_1d(line, xs);
      for (int j = 0; j < new_n; ++j) {
        const int x = axis == 0 ? j : u;
        const int y = axis == 0 ? u : (axis == 1 ? j : v);
        const int z = axis == 2 ? j : v;
        out(x, y, z) = static_cast<float>(res[static_cast<size_t>(j)]);
      }
    }
  return out;
}

}  // namespace

CTVolume resample_isotropic(const CTVolume& volume) {
  const double target =
      std::min(volume.spacing.x, std::min(volume.spacing.y, volume.spacing.z));
  CTVolume out;
  out.hu = volume.hu;
  out.origin = volume.origin;
  out.hu = resample_axis(out.hu, 0, target / volume.spacing.x);
  out.hu = resample_axis(out.hu, 1, target / volume.spacing.y);
  out.hu = resample_axis(out.hu, 2, target / volume.spacing.z);
  out.spacing = {target, target, target};
  return out;
}

}  // namespace c2c
