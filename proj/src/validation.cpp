#include "c2c/validation.hpp"

#include <algorithm>
#include <cmath>

#include "c2c/csv.hpp"
#include "c2c/errors.hpp"
#include "c2c/spine.hpp"

namespace c2c {

double dice(const Array2<uint8_t>& a, const Array2<uint8_t>& b) {
  if (a.w != b.w || a.h != b.h) fail(Err::ShapeMismatch, "dice: mask shapes differ");
  long long na = 0, nb = 0, ni = 0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    if (a.v[i]) ++na;
    if (b.v[i]) ++nb;
    if (a.v[i] && b.v[i]) ++ni;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(ni) / static_cast<double>(na + nb);
}

double dice3(const Array3<int16_t>& a, const Array3<int16_t>& b, int16_t label) {
  if (a.nx != b.nx || a.ny != b.ny || a.nz != b.nz)
    fail(Err::ShapeMismatch, "dice: mask shapes differ");
  long long na = 0, nb = 0, ni = 0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    const bool ia = a.v[i] == label, ib = b.v[i] == label;
    if (ia) ++na;
    if (ib) ++nb;
    if (ia && ib) ++ni;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(ni) / static_cast<double>(na + nb);
}

namespace {

double mean_of(std::vector<double> v) {
  double acc = 0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Body center for one level, via the same chain analyze_spine uses.
IVec3 procedure_center(const SegmentationMask& mask, Level level) {
  const int x = rl_center_of_mass(mask, level);
  const auto plane = sagittal_level_slice(mask, level, x);
  const auto iso = isolate_vertebral_body(plane);
  const auto [y, z] = body_center_2d(iso.body);
  return {x, y, z};
}

// Mean HU over a cubic block of `px` voxels per side; even sizes extend one
// voxel further toward negative indices.
double cube_mean(const CTVolume& v, IVec3 c, int px) {
  const int lo = px / 2, hi = (px - 1) / 2;
  double acc = 0;
  long long n = 0;
  for (int dz = -lo; dz <= hi; ++dz)
    for (int dy = -lo; dy <= hi; ++dy)
      for (int dx = -lo; dx <= hi; ++dx) {
        const int x = c.x + dx, y = c.y + dy, z = c.z + dz;
        if (!v.hu.in_bounds(x, y, z))
          fail(Err::RoiExceedsVolume, "validation cube leaves the volume");
        acc += v.hu(x, y, z);
        ++n;
      }
  return acc / static_cast<double>(n);
}

}  // namespace

ValidationReport compare_spine(const SegmentationMask& pred, const SegmentationMask& ref,
                               const CTVolume& volume, int cubic_roi_px) {
  if (pred.labels.nx != ref.labels.nx || pred.labels.ny != ref.labels.ny ||
      pred.labels.nz != ref.labels.nz)
    fail(Err::ShapeMismatch, "compare_spine: mask shapes differ");
  if (pred.labels.nx != volume.nx() || pred.labels.ny != volume.ny() ||
      pred.labels.nz != volume.nz())
    fail(Err::ShapeMismatch, "compare_spine: masks do not match the volume");
  if (cubic_roi_px < 1) fail(Err::UsageError, "compare_spine: roi must be >= 1 voxel");

  ValidationReport rep;
  std::vector<double> verr, herr, perr;
  for (Level level : kLevels) {
    const int16_t id = static_cast<int16_t>(level_label_id(level));
    const bool in_pred = std::any_of(pred.labels.v.begin(), pred.labels.v.end(),
                                     [&](int16_t v) { return v == id; });
    const bool in_ref = std::any_of(ref.labels.v.begin(), ref.labels.v.end(),
                                    [&](int16_t v) { return v == id; });
    if (!in_pred && !in_ref) continue;
    if (!in_pred || !in_ref)
      fail(Err::EmptyLevel,
           std::string(level_name(level)) + " present in only one of the masks");

    LevelComparison c;
    c.level = level;
    const int zp = superior_inferior_center(pred, level);
    const int zr = superior_inferior_center(ref, level);
    c.vertical_center_error_mm = std::abs(zp - zr) * volume.spacing.z;

    const double hp = cube_mean(volume, procedure_center(pred, level), cubic_roi_px);
    const double hr = cube_mean(volume, procedure_center(ref, level), cubic_roi_px);
    c.roi_hu_error = std::abs(hp - hr);
    if (std::abs(hr) > 1e-12)
      c.roi_hu_pct_error = 100.0 * c.roi_hu_error / std::abs(hr);
    else
      c.roi_hu_pct_error = c.roi_hu_error < 1e-12 ? 0.0 : 100.0;

    verr.push_back(c.vertical_center_error_mm);
    herr.push_back(c.roi_hu_error);
    perr.push_back(c.roi_hu_pct_error);
    rep.levels.push_back(c);
  }

  rep.mean_vertical_error_mm = mean_of(verr);
  rep.median_vertical_error_mm = median_of(verr);
  rep.mean_hu_error = mean_of(herr);
  rep.median_hu_error = median_of(herr);
  rep.mean_hu_pct_error = mean_of(perr);
  rep.median_hu_pct_error = median_of(perr);
  return rep;
}

ValidationReport compare_tissue(const TissueMasks& pred, const TissueMasks& ref) {
  ValidationReport rep;
  for (Tissue t : kTissues) {
    auto ip = pred.find(t);
    auto ir = ref.find(t);
    if (ip == pred.end() && ir == ref.end()) continue;
    if (ip == pred.end() || ir == ref.end()) {
      rep.tissue_dice[t] = 0.0;
      continue;
    }
    rep.tissue_dice[t] = dice(ip->second, ir->second);
  }
  return rep;
}

std::string validation_report_csv(const ValidationReport& r) {
  std::string out = csv_line({"section", "key", "vertical_center_error_mm", "roi_hu_error",
                              "roi_hu_pct_error", "dice"});
  for (const auto& c : r.levels)
    out += csv_line({"level", level_name(c.level), csv_float(c.vertical_center_error_mm),
                     csv_float(c.roi_hu_error), csv_float(c.roi_hu_pct_error), ""});
  if (!r.levels.empty()) {
    out += csv_line({"aggregate", "mean", csv_float(r.mean_vertical_error_mm),
                     csv_float(r.mean_hu_error), csv_float(r.mean_hu_pct_error), ""});
    out += csv_line({"aggregate", "median", csv_float(r.median_vertical_error_mm),
                     csv_float(r.median_hu_error), csv_float(r.median_hu_pct_error), ""});
  }
  for (const auto& [t, d] : r.tissue_dice)
    out += csv_line({"tissue", tissue_name(t), "", "", "", csv_float(d)});
  return out;
}

}  // namespace c2c
