#include "c2c/spine.hpp"

#include <algorithm>
#include <cmath>

#include "c2c/errors.hpp"
#include "c2c/image_ops.hpp"

namespace c2c {

namespace {

// Offsets of every voxel inside the mask belonging to `level`, or empty.
bool level_bounds(const SegmentationMask& mask, Level level, long long& n, double& sx,
                  double& sz) {
  const int16_t id = static_cast<int16_t>(level_label_id(level));
  n = 0;
  double acc_x = 0.0, acc_z = 0.0;
  const auto& a = mask.labels;
  for (int z = 0; z < a.nz; ++z)
    for (int y = 0; y < a.ny; ++y)
      for (int x = 0; x < a.nx; ++x)
        if (a(x, y, z) == id) {
          ++n;
          acc_x += x;
          acc_z += z;
        }
  if (n == 0) return false;
  sx = acc_x / static_cast<double>(n);
  sz = acc_z / static_cast<double>(n);
  return true;
}

}  // namespace

int rl_center_of_mass(const SegmentationMask& mask, Level level) {
  long long n;
  double mx, mz;
  if (!level_bounds(mask, level, n, mx, mz))
    fail(Err::EmptyLevel, std::string("no voxels labeled ") + level_name(level));
  return round_half_away(mx);
}

int superior_inferior_center(const SegmentationMask& mask, Level level) {
  long long n;
  double mx, mz;
  if (!level_bounds(mask, level, n, mx, mz))
    fail(Err::EmptyLevel, std::string("no voxels labeled ") + level_name(level));
  return round_half_away(mz);
}

Array2<uint8_t> sagittal_level_slice(const SegmentationMask& mask, Level level, int plane_x) {
  const auto& a = mask.labels;
  if (plane_x < 0 || plane_x >= a.nx)
    fail(Err::CenterOutOfBounds, "sagittal plane x=" + std::to_string(plane_x));
  const int16_t id = static_cast<int16_t>(level_label_id(level));
  Array2<uint8_t> out(a.ny, a.nz);
  for (int z = 0; z < a.nz; ++z)
    for (int y = 0; y < a.ny; ++y) out(y, z) = a(plane_x, y, z) == id ? 1 : 0;
  return out;
}

BodyIsolation isolate_vertebral_body(const Array2<uint8_t>& sagittal_fg) {
  Array2<int32_t> labels;
  auto comps = label_components_2d(sagittal_fg, 8, labels);
  if (comps.empty()) fail(Err::EmptySlice, "no foreground on sagittal slice");

  BodyIsolation out;
  out.body = Array2<uint8_t>(sagittal_fg.w, sagittal_fg.h);
  if (comps.size() == 1) {
    out.body = sagittal_fg;
    out.single_component = true;
    return out;
  }

  // Two largest components; the plane axes are (y, z) so centroid_x is the
  // anterior-posterior coordinate and the posterior-most one is dropped.
  std::vector<int> order(comps.size());
  for (size_t i = 0; i < order.size(); ++i) order[static_cast<size_t>(i)] = static_cast<int>(i);
  // Equal areas at the cut: the more anterior one wins the slot.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ca = comps[static_cast<size_t>(a)];
    const auto& cb = comps[static_cast<size_t>(b)];
    if (ca.area != cb.area) return ca.area > cb.area;
    return ca.centroid_x < cb.centroid_x;
  });
  const Component2D& c0 = comps[static_cast<size_t>(order[0])];
  const Component2D& c1 = comps[static_cast<size_t>(order[1])];
  const Component2D& body = c0.centroid_x > c1.centroid_x ? c1 : c0;
  for (size_t i = 0; i < labels.v.size(); ++i)
    out.body.v[i] = labels.v[i] == body.label ? 1 : 0;
  out.single_component = false;
  return out;
}

std::pair<int, int> body_center_2d(const Array2<uint8_t>& body_mask) {
  long long n = 0;
  double ax = 0.0, ay = 0.0;
  for (int y = 0; y < body_mask.h; ++y)
    for (int x = 0; x < body_mask.w; ++x)
      if (body_mask(x, y)) {
        ++n;
        ax += x;
        ay += y;
      }
  if (n == 0) fail(Err::EmptyMask, "empty body mask");
  return {round_half_away(ax / static_cast<double>(n)),
          round_half_away(ay / static_cast<double>(n))};
}

std::vector<IVec3> build_roi(const CTVolume& volume, IVec3 center, const RoiSpec& spec) {
  const auto& a = volume.hu;
  if (!a.in_bounds(center.x, center.y, center.z))
    fail(Err::CenterOutOfBounds, "roi center (" + std::to_string(center.x) + "," +
                                     std::to_string(center.y) + "," + std::to_string(center.z) +
                                     ")");
  const double r = spec.diameter_mm / 2.0;
  if (r < 0.0) fail(Err::EmptyRoi, "negative roi diameter");
  const double sx = volume.spacing.x, sy = volume.spacing.y, sz = volume.spacing.z;
  const int ex = static_cast<int>(std::floor(r / sx));
  const int ey = static_cast<int>(std::floor(r / sy));
  const int ez = static_cast<int>(std::floor(r / sz));

  std::vector<IVec3> out;
  const double r2 = r * r;
  for (int dz = -ez; dz <= ez; ++dz)
    for (int dy = -ey; dy <= ey; ++dy)
      for (int dx = -ex; dx <= ex; ++dx) {
        bool inside;
        if (spec.shape == RoiShape::sphere) {
          const double px = dx * sx, py = dy * sy, pz = dz * sz;
          inside = px * px + py * py + pz * pz <= r2;
        } else {
          inside = std::abs(dx * sx) <= r && std::abs(dy * sy) <= r && std::abs(dz * sz) <= r;
        }
        if (!inside) continue;
        const int x = center.x + dx, y = center.y + dy, z = center.z + dz;
        if (!a.in_bounds(x, y, z))
          fail(Err::RoiExceedsVolume, "roi extends outside the volume at (" + std::to_string(x) +
                                          "," + std::to_string(y) + "," + std::to_string(z) + ")");
        out.push_back({x, y, z});
      }
  if (out.empty()) fail(Err::EmptyRoi, "roi selects no voxels");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double roi_statistic(const CTVolume& volume, const std::vector<IVec3>& roi_voxels, RoiStat stat) {
  if (roi_voxels.empty()) fail(Err::EmptyRoi, "statistic over empty roi");
  std::vector<double> vals;
  vals.reserve(roi_voxels.size());
  for (const auto& p : roi_voxels) vals.push_back(volume.hu(p.x, p.y, p.z));
  if (stat == RoiStat::mean) {
    double acc = 0.0;
    for (double v : vals) acc += v;
    return acc / static_cast<double>(vals.size());
  }
  std::sort(vals.begin(), vals.end());
  const size_t n = vals.size();
  if (n % 2 == 1) return vals[n / 2];
  return (vals[n / 2 - 1] + vals[n / 2]) / 2.0;
}

SpineAnalysis analyze_spine(const CTVolume& volume, const SegmentationMask& spine_mask,
                            const RoiSpec& spec) {
  if (volume.hu.nx != spine_mask.labels.nx || volume.hu.ny != spine_mask.labels.ny ||
      volume.hu.nz != spine_mask.labels.nz)
    fail(Err::ShapeMismatch,
         "volume " + std::to_string(volume.hu.nx) + "x" + std::to_string(volume.hu.ny) + "x" +
             std::to_string(volume.hu.nz) + " vs mask " + std::to_string(spine_mask.labels.nx) +
             "x" + std::to_string(spine_mask.labels.ny) + "x" +
             std::to_string(spine_mask.labels.nz));

  SpineAnalysis out;
  for (Level level : kLevels) {
    try {
      SpineLevelResult r;
      r.level = level;
      r.rl_center_index = rl_center_of_mass(spine_mask, level);
      Array2<uint8_t> plane = sagittal_level_slice(spine_mask, level, r.rl_center_index);
      BodyIsolation iso = isolate_vertebral_body(plane);
      r.single_component = iso.single_component;
      r.body_center_yz = body_center_2d(iso.body);
      r.roi_center = {r.rl_center_index, r.body_center_yz.first, r.body_center_yz.second};
      r.roi_voxels = build_roi(volume, r.roi_center, spec);
      r.hu_statistic = roi_statistic(volume, r.roi_voxels, spec.statistic);
      {
        long long n;
        double mx, mz;
        level_bounds(spine_mask, level, n, mx, mz);
        r.si_mean_z = mz;
      }
      r.si_center_z = superior_inferior_center(spine_mask, level);
      if (r.si_center_z >= 0 && r.si_center_z < static_cast<int>(volume.source_paths.size()))
        r.si_center_path = volume.source_paths[static_cast<size_t>(r.si_center_z)];
      out.results.push_back(std::move(r));
    } catch (const Error& e) {
      out.skipped.push_back({level, e.what()});
    }
  }
  return out;
}

}  // namespace c2c
