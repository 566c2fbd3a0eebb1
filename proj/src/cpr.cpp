#include "c2c/cpr.hpp"

#include <algorithm>
#include <cmath>

#include "c2c/errors.hpp"

namespace c2c {

CprPath build_cpr_path(const std::vector<Vec3>& centers, int nz) {
  if (nz < 1) fail(Err::UsageError, "cpr path needs nz >= 1");

  // Superior (largest z) first; duplicate-z centers keep the first given.
  std::vector<Vec3> pts = centers;
  std::stable_sort(pts.begin(), pts.end(), [](const Vec3& a, const Vec3& b) { return a.z > b.z; });
  std::vector<Vec3> uniq;
  for (const auto& p : pts)
    if (uniq.empty() || p.z != uniq.back().z) uniq.push_back(p);
  if (uniq.size() < 2) fail(Err::FewerThanTwoCenters, "cpr path needs >= 2 distinct centers");

  CprPath out;
  out.control_points = uniq;
  out.samples.reserve(static_cast<size_t>(nz));
  for (int row = 0; row < nz; ++row) {
    const double z = static_cast<double>(nz - 1 - row);  // top row = superior
    Vec3 p;
    p.z = z;
    if (z >= uniq.front().z) {
      p.x = uniq.front().x;
      p.y = uniq.front().y;
    } else if (z <= uniq.back().z) {
      p.x = uniq.back().x;
      p.y = uniq.back().y;
    } else {
      for (size_t i = 0; i + 1 < uniq.size(); ++i) {
        const Vec3& a = uniq[i];
        const Vec3& b = uniq[i + 1];
        if (z <= a.z && z >= b.z) {
          const double t = (a.z - z) / (a.z - b.z);
          p.x = a.x + t * (b.x - a.x);
          p.y = a.y + t * (b.y - a.y);
          break;
        }
      }
    }
    out.samples.push_back(p);
  }
  return out;
}

float trilinear_sample(const Array3<float>& a, double x, double y, double z) {
  const auto clampd = [](double v, int n) { return std::clamp(v, 0.0, static_cast<double>(n - 1)); };
  x = clampd(x, a.nx);
  y = clampd(y, a.ny);
  z = clampd(z, a.nz);
  const int x0 = std::min(static_cast<int>(x), a.nx - 2 >= 0 ? a.nx - 2 : 0);
  const int y0 = std::min(static_cast<int>(y), a.ny - 2 >= 0 ? a.ny - 2 : 0);
  const int z0 = std::min(static_cast<int>(z), a.nz - 2 >= 0 ? a.nz - 2 : 0);
  const int x1 = std::min(x0 + 1, a.nx - 1);
  const int y1 = std::min(y0 + 1, a.ny - 1);
  const int z1 = std::min(z0 + 1, a.nz - 1);
  const double tx = x - x0, ty = y - y0, tz = z - z0;

  const double c000 = a(x0, y0, z0), c100 = a(x1, y0, z0);
  const double c010 = a(x0, y1, z0), c110 = a(x1, y1, z0);
  const double c001 = a(x0, y0, z1), c101 = a(x1, y0, z1);
  const double c011 = a(x0, y1, z1), c111 = a(x1, y1, z1);

  const double c00 = c000 + (c100 - c000) * tx;
  const double c10 = c010 + (c110 - c010) * tx;
  const double c01 = c001 + (c101 - c001) * tx;
  const double c11 = c011 + (c111 - c011) * tx;
  const double c0 = c00 + (c10 - c00) * ty;
  const double c1 = c01 + (c11 - c01) * ty;
  return static_cast<float>(c0 + (c1 - c0) * tz);
}

Array2<float> sample_cpr(const CTVolume& volume, const CprPath& path, CprPlane plane) {
  const auto& a = volume.hu;
  for (const auto& p : path.samples)
    if (p.x < 0 || p.x > a.nx - 1 || p.y < 0 || p.y > a.ny - 1 || p.z < 0 || p.z > a.nz - 1)
      fail(Err::PathOutOfBounds, "path sample outside volume");

  const int w = plane == CprPlane::coronal ? a.nx : a.ny;
  Array2<float> img(w, static_cast<int>(path.samples.size()));
  for (size_t r = 0; r < path.samples.size(); ++r) {
    const Vec3& p = path.samples[r];
    for (int c = 0; c < w; ++c) {
      const double x = plane == CprPlane::coronal ? c : p.x;
      const double y = plane == CprPlane::coronal ? p.y : c;
      img(c, static_cast<int>(r)) = trilinear_sample(a, x, y, p.z);
    }
  }
  return img;
}

}  // namespace c2c
