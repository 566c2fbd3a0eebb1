#include "c2c/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "c2c/dicom.hpp"
#include "c2c/errors.hpp"
#include "c2c/nifti.hpp"

namespace c2c {

namespace {

[[noreturn]] void infeasible(const std::string& msg) { fail(Err::SpecInfeasible, msg); }

}  // namespace

SpinePhantom generate_spine_phantom(const SpinePhantomSpec& spec) {
  if (spec.nx < 2 || spec.ny < 2 || spec.nz < 2) infeasible("spine phantom: volume too small");
  const double sx = spec.spacing.x, sy = spec.spacing.y, sz = spec.spacing.z;
  if (sx <= 0 || sy <= 0 || sz <= 0) infeasible("spine phantom: nonpositive spacing");
  const double ex = (spec.nx - 1) * sx, ey = (spec.ny - 1) * sy, ez = (spec.nz - 1) * sz;

  for (const auto& l : spec.levels) {
    if (l.body_radius <= 0 || l.shell_thickness < 0 || l.shell_thickness >= l.body_radius ||
        l.half_height <= 0)
      infeasible("spine phantom: bad body geometry for " + std::string(level_name(l.level)));
    if (l.cx - l.body_radius < 0 || l.cx + l.body_radius > ex || l.cy - l.body_radius < 0 ||
        l.cy + l.body_radius > ey || l.cz - l.half_height < 0 || l.cz + l.half_height > ez)
      infeasible("spine phantom: body outside volume for " + std::string(level_name(l.level)));
    if (l.process_offset > 0) {
      if (l.process_offset - l.process_half_d - l.body_radius < 2.0 * sy)
        infeasible("spine phantom: process too close to body for " +
                   std::string(level_name(l.level)));
      if (l.cy + l.process_offset + l.process_half_d > ey ||
          l.cx - l.process_half_w < 0 || l.cx + l.process_half_w > ex ||
          l.cz - l.process_half_h < 0 || l.cz + l.process_half_h > ez)
        infeasible("spine phantom: process outside volume for " +
                   std::string(level_name(l.level)));
    }
  }

  SpinePhantom out;
  out.volume.hu = Array3<float>(spec.nx, spec.ny, spec.nz);
  out.volume.hu.fill(static_cast<float>(spec.background_hu));
  out.volume.spacing = spec.spacing;
  out.mask.labels = Array3<int16_t>(spec.nx, spec.ny, spec.nz);
  out.mask.label_map = default_spine_label_map();
  out.mask.spacing = spec.spacing;

  struct Acc {
    long long n = 0;
    double sum_x = 0, sum_z = 0;
  };
  std::vector<Acc> acc(spec.levels.size());

  for (int z = 0; z < spec.nz; ++z) {
    const double pz = z * sz;
    for (int y = 0; y < spec.ny; ++y) {
      const double py = y * sy;
      for (int x = 0; x < spec.nx; ++x) {
        const double px = x * sx;
        for (size_t i = 0; i < spec.levels.size(); ++i) {
          const auto& l = spec.levels[i];
          double hu;
          bool inside = false;
          const double dx = px - l.cx, dy = py - l.cy;
          if (std::abs(pz - l.cz) <= l.half_height &&
              dx * dx + dy * dy <= l.body_radius * l.body_radius) {
            const double rt = l.body_radius - l.shell_thickness;
            hu = dx * dx + dy * dy <= rt * rt ? l.trabecular_hu : l.cortical_hu;
            inside = true;
          } else if (l.process_offset > 0 && std::abs(px - l.cx) <= l.process_half_w &&
                     std::abs(py - (l.cy + l.process_offset)) <= l.process_half_d &&
                     std::abs(pz - l.cz) <= l.process_half_h) {
            hu = l.cortical_hu;
            inside = true;
          }
          if (!inside) continue;
          if (out.mask.labels(x, y, z) != 0)
            infeasible("spine phantom: levels overlap at voxel (" + std::to_string(x) + "," +
                       std::to_string(y) + "," + std::to_string(z) + ")");
          out.mask.labels(x, y, z) = static_cast<int16_t>(level_label_id(l.level));
          out.volume.hu(x, y, z) = static_cast<float>(hu);
          acc[i].n++;
          acc[i].sum_x += x;
          acc[i].sum_z += z;
        }
      }
    }
  }

  if (spec.noise_sigma > 0) {
    std::mt19937 rng(spec.noise_seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (auto& v : out.volume.hu.v) v = static_cast<float>(v + noise(rng));
  }

  for (size_t i = 0; i < spec.levels.size(); ++i) {
    const auto& l = spec.levels[i];
    if (acc[i].n == 0) infeasible("spine phantom: level produced no voxels");
    SpineLevelTruth t;
    t.level = l.level;
    t.body_center = {round_half_away(l.cx / sx), round_half_away(l.cy / sy),
                     round_half_away(l.cz / sz)};
    t.trabecular_hu = l.trabecular_hu;
    t.voxel_count = acc[i].n;
    t.mean_x = acc[i].sum_x / static_cast<double>(acc[i].n);
    t.mean_z = acc[i].sum_z / static_cast<double>(acc[i].n);
    t.rl_center_x = round_half_away(t.mean_x);
    t.si_center_z = round_half_away(t.mean_z);
    out.truth.push_back(t);
  }
  return out;
}

namespace {

bool in_ellipse(double x, double y, double cx, double cy, double a, double b) {
  if (a <= 0 || b <= 0) return false;
  const double dx = (x - cx) / a, dy = (y - cy) / b;
  return dx * dx + dy * dy <= 1.0;
}

struct Rect {
  int x0, y0, w, h;
  bool contains(int x, int y) const { return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h; }
};

bool rects_touch(const Rect& a, const Rect& b) {
  // true when the rectangles overlap or are 8-adjacent
  return a.x0 - 1 < b.x0 + b.w && b.x0 - 1 < a.x0 + a.w && a.y0 - 1 < b.y0 + b.h &&
         b.y0 - 1 < a.y0 + a.h;
}

}  // namespace

SlicePhantom generate_slice_phantom(const SlicePhantomSpec& spec) {
  if (spec.nx < 8 || spec.ny < 8) infeasible("slice phantom: too small");
  if (spec.spacing.x <= 0 || spec.spacing.y <= 0) infeasible("slice phantom: bad spacing");
  if (spec.sat_thickness <= 0 || spec.muscle_thickness <= 0)
    infeasible("slice phantom: nonpositive ring thickness");

  const double a1 = spec.body_a, b1 = spec.body_b;
  const double a2 = a1 - spec.sat_thickness, b2 = b1 - spec.sat_thickness;
  const double a3 = a2 - spec.muscle_thickness, b3 = b2 - spec.muscle_thickness;
  if (a3 <= 2 || b3 <= 2) infeasible("slice phantom: vat disk collapses");
  if (spec.body_cx - a1 < 1 || spec.body_cx + a1 > spec.nx - 2 || spec.body_cy - b1 < 1 ||
      spec.body_cy + b1 > spec.ny - 2)
    infeasible("slice phantom: body ellipse outside image");

  const PostProcessConfig cfg;  // phantom truths assume the default chain
  if (spec.muscle_hu > cfg.imat_hu_low && spec.muscle_hu < cfg.imat_hu_high)
    infeasible("slice phantom: muscle HU inside the imat window");

  SlicePhantom out;
  out.hu = Array2<float>(spec.nx, spec.ny);
  Array2<uint8_t> sat_region(spec.nx, spec.ny), muscle_region(spec.nx, spec.ny),
      vat_region(spec.nx, spec.ny);

  long long inner_area = 0;  // pixels enclosed by the sat annulus
  for (int y = 0; y < spec.ny; ++y)
    for (int x = 0; x < spec.nx; ++x) {
      double hu = spec.background_hu;
      if (in_ellipse(x, y, spec.body_cx, spec.body_cy, a3, b3)) {
        vat_region(x, y) = 1;
        hu = spec.vat_hu;
        ++inner_area;
      } else if (in_ellipse(x, y, spec.body_cx, spec.body_cy, a2, b2)) {
        muscle_region(x, y) = 1;
        hu = spec.muscle_hu;
        ++inner_area;
      } else if (in_ellipse(x, y, spec.body_cx, spec.body_cy, a1, b1)) {
        sat_region(x, y) = 1;
        hu = spec.sat_hu;
      }
      out.hu(x, y) = static_cast<float>(hu);
    }

  long long vat_area = 0;
  for (uint8_t v : vat_region.v) vat_area += v;
  // Regions enclosed by a ring read as that ring's holes; they must clear
  // the fill thresholds or the expected-mask bookkeeping below is wrong.
  if (inner_area < cfg.sat_hole_max_px)
    infeasible("slice phantom: interior smaller than the sat hole threshold");
  if (vat_area < cfg.other_hole_max_px)
    infeasible("slice phantom: vat disk smaller than the hole threshold");

  // pockets: off-HU rectangles inside muscle
  std::vector<Rect> pocket_rects;
  for (const auto& p : spec.pockets) {
    if (p.w <= 0 || p.h <= 0) infeasible("slice phantom: empty pocket");
    Rect r{p.x0, p.y0, p.w, p.h};
    for (int y = r.y0; y < r.y0 + r.h; ++y)
      for (int x = r.x0; x < r.x0 + r.w; ++x)
        if (x < 0 || x >= spec.nx || y < 0 || y >= spec.ny || !muscle_region(x, y))
          infeasible("slice phantom: pocket leaves the muscle ring");
    for (const auto& q : pocket_rects)
      if (rects_touch(r, q)) infeasible("slice phantom: pockets touch");
    pocket_rects.push_back(r);
    for (int y = r.y0; y < r.y0 + r.h; ++y)
      for (int x = r.x0; x < r.x0 + r.w; ++x) out.hu(x, y) = static_cast<float>(p.hu);
  }

  // raw masks = regions minus holes
  TissueMasks raw;
  raw[Tissue::muscle] = muscle_region;
  raw[Tissue::vat] = vat_region;
  raw[Tissue::sat] = sat_region;

  std::vector<Rect> hole_rects;
  for (const auto& hole : spec.holes) {
    if (hole.w <= 0 || hole.h <= 0) infeasible("slice phantom: empty hole");
    if (hole.tissue == Tissue::imat) infeasible("slice phantom: holes target raw tissues only");
    const Array2<uint8_t>& region = hole.tissue == Tissue::muscle ? muscle_region
                                    : hole.tissue == Tissue::vat  ? vat_region
                                                                  : sat_region;
    Rect r{hole.x0, hole.y0, hole.w, hole.h};
    // rectangle plus its 4-neighborhood must stay inside the tissue region,
    // so the carved component is exactly the rectangle
    for (int y = r.y0 - 1; y < r.y0 + r.h + 1; ++y)
      for (int x = r.x0 - 1; x < r.x0 + r.w + 1; ++x) {
        const bool corner = (x == r.x0 - 1 || x == r.x0 + r.w) && (y == r.y0 - 1 || y == r.y0 + r.h);
        if (corner) continue;
        if (x < 0 || x >= spec.nx || y < 0 || y >= spec.ny || !region(x, y))
          infeasible("slice phantom: hole not interior to its tissue");
      }
    for (const auto& q : hole_rects)
      if (rects_touch(r, q)) infeasible("slice phantom: holes touch");
    for (const auto& q : pocket_rects)
      if (rects_touch(r, q)) infeasible("slice phantom: hole touches a pocket");
    hole_rects.push_back(r);
    auto& m = raw[hole.tissue];
    for (int y = r.y0; y < r.y0 + r.h; ++y)
      for (int x = r.x0; x < r.x0 + r.w; ++x) m(x, y) = 0;
  }
  out.raw_masks = raw;

  // Expected post-processing results, from the construction rules alone.
  TissueMasks expected;
  expected[Tissue::muscle] = muscle_region;
  expected[Tissue::vat] = vat_region;
  expected[Tissue::sat] = sat_region;
  expected[Tissue::imat] = Array2<uint8_t>(spec.nx, spec.ny);

  for (const auto& hole : spec.holes) {
    const int area = hole.w * hole.h;
    const int threshold = hole.tissue == Tissue::sat ? cfg.sat_hole_max_px : cfg.other_hole_max_px;
    if (area < threshold) continue;  // refilled
    auto& m = expected[hole.tissue];
    for (int y = hole.y0; y < hole.y0 + hole.h; ++y)
      for (int x = hole.x0; x < hole.x0 + hole.w; ++x) m(x, y) = 0;
  }
  for (const auto& p : spec.pockets) {
    if (!(p.hu > cfg.imat_hu_low && p.hu < cfg.imat_hu_high)) continue;
    if (p.w * p.h < cfg.imat_min_component_px) continue;  // reverts to muscle
    for (int y = p.y0; y < p.y0 + p.h; ++y)
      for (int x = p.x0; x < p.x0 + p.w; ++x) {
        expected[Tissue::imat](x, y) = 1;
        expected[Tissue::muscle](x, y) = 0;
      }
  }
  out.expected_masks = expected;

  for (Tissue t : kTissues) {
    long long n = 0;
    double sum = 0;
    const auto& m = expected[t];
    for (int y = 0; y < spec.ny; ++y)
      for (int x = 0; x < spec.nx; ++x)
        if (m(x, y)) {
          ++n;
          sum += out.hu(x, y);
        }
    out.expected_counts[t] = n;
    if (n > 0) out.expected_mean_hu[t] = sum / static_cast<double>(n);
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> tokenize_spec(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  return lines;
}

double num(const std::vector<std::string>& toks, size_t i, const std::string& key) {
  if (i >= toks.size()) fail(Err::UnparseableFile, "phantom spec: " + key + ": missing field");
  try {
    size_t used = 0;
    const double v = std::stod(toks[i], &used);
    if (used != toks[i].size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail(Err::UnparseableFile, "phantom spec: " + key + ": bad number '" + toks[i] + "'");
  }
}

}  // namespace

SpinePhantomSpec parse_spine_phantom_spec(const std::string& text) {
  SpinePhantomSpec spec;
  spec.levels.clear();
  for (const auto& toks : tokenize_spec(text)) {
    const std::string& key = toks[0];
    if (key == "shape") {
      spec.nx = static_cast<int>(num(toks, 1, key));
      spec.ny = static_cast<int>(num(toks, 2, key));
      spec.nz = static_cast<int>(num(toks, 3, key));
    } else if (key == "spacing") {
      spec.spacing = {num(toks, 1, key), num(toks, 2, key), num(toks, 3, key)};
    } else if (key == "background") {
      spec.background_hu = num(toks, 1, key);
    } else if (key == "noise_sigma") {
      spec.noise_sigma = num(toks, 1, key);
    } else if (key == "noise_seed") {
      spec.noise_seed = static_cast<uint32_t>(num(toks, 1, key));
    } else if (key == "level") {
      if (toks.size() != 10 && toks.size() != 14)
        fail(Err::UnparseableFile, "phantom spec: level takes 9 or 13 fields");
      PhantomLevel l;
      const auto lv = level_from_name(toks[1]);
      if (!lv) fail(Err::UnparseableFile, "phantom spec: unknown level '" + toks[1] + "'");
      l.level = *lv;
      l.cx = num(toks, 2, key);
      l.cy = num(toks, 3, key);
      l.cz = num(toks, 4, key);
      l.body_radius = num(toks, 5, key);
      l.shell_thickness = num(toks, 6, key);
      l.half_height = num(toks, 7, key);
      l.trabecular_hu = num(toks, 8, key);
      l.cortical_hu = num(toks, 9, key);
      if (toks.size() == 14) {
        l.process_offset = num(toks, 10, key);
        l.process_half_w = num(toks, 11, key);
        l.process_half_d = num(toks, 12, key);
        l.process_half_h = num(toks, 13, key);
      } else {
        l.process_offset = 0;  // no process block
      }
      spec.levels.push_back(l);
    } else {
      fail(Err::UnparseableFile, "phantom spec: unknown key '" + key + "'");
    }
  }
  return spec;
}

SlicePhantomSpec parse_slice_phantom_spec(const std::string& text) {
  SlicePhantomSpec spec;
  for (const auto& toks : tokenize_spec(text)) {
    const std::string& key = toks[0];
    if (key == "shape") {
      spec.nx = static_cast<int>(num(toks, 1, key));
      spec.ny = static_cast<int>(num(toks, 2, key));
    } else if (key == "spacing") {
      spec.spacing.x = num(toks, 1, key);
      spec.spacing.y = num(toks, 2, key);
    } else if (key == "background") {
      spec.background_hu = num(toks, 1, key);
    } else if (key == "body") {
      spec.body_cx = num(toks, 1, key);
      spec.body_cy = num(toks, 2, key);
      spec.body_a = num(toks, 3, key);
      spec.body_b = num(toks, 4, key);
    } else if (key == "sat") {
      spec.sat_thickness = num(toks, 1, key);
      spec.sat_hu = num(toks, 2, key);
    } else if (key == "muscle") {
      spec.muscle_thickness = num(toks, 1, key);
      spec.muscle_hu = num(toks, 2, key);
    } else if (key == "vat") {
      spec.vat_hu = num(toks, 1, key);
    } else if (key == "pocket") {
      SlicePocket p;
      p.x0 = static_cast<int>(num(toks, 1, key));
      p.y0 = static_cast<int>(num(toks, 2, key));
      p.w = static_cast<int>(num(toks, 3, key));
      p.h = static_cast<int>(num(toks, 4, key));
      p.hu = num(toks, 5, key);
      spec.pockets.push_back(p);
    } else if (key == "hole") {
      if (toks.size() != 6) fail(Err::UnparseableFile, "phantom spec: hole takes 5 fields");
      SliceHole h;
      const auto t = tissue_from_name(toks[1]);
      if (!t) fail(Err::UnparseableFile, "phantom spec: unknown tissue '" + toks[1] + "'");
      h.tissue = *t;
      h.x0 = static_cast<int>(num(toks, 2, key));
      h.y0 = static_cast<int>(num(toks, 3, key));
      h.w = static_cast<int>(num(toks, 4, key));
      h.h = static_cast<int>(num(toks, 5, key));
      spec.holes.push_back(h);
    } else {
      fail(Err::UnparseableFile, "phantom spec: unknown key '" + key + "'");
    }
  }
  return spec;
}

SeriesFixture make_series_fixture(const SpinePhantomSpec& spine_spec,
                                  const SlicePhantomSpec& slice_spec) {
  if (spine_spec.nx != slice_spec.nx || spine_spec.ny != slice_spec.ny)
    infeasible("fixture: spine and slice grids differ");
  if (spine_spec.spacing.x != slice_spec.spacing.x || spine_spec.spacing.y != slice_spec.spacing.y)
    infeasible("fixture: spine and slice spacing differ");

  SeriesFixture fx;
  fx.slice = generate_slice_phantom(slice_spec);
  SpinePhantom sp = generate_spine_phantom(spine_spec);

  // tissue pattern extruded along z, spine structures written on top
  fx.volume.hu = Array3<float>(spine_spec.nx, spine_spec.ny, spine_spec.nz);
  fx.volume.spacing = spine_spec.spacing;
  for (int z = 0; z < spine_spec.nz; ++z)
    for (int y = 0; y < spine_spec.ny; ++y)
      for (int x = 0; x < spine_spec.nx; ++x) fx.volume.hu(x, y, z) = fx.slice.hu(x, y);

  for (int z = 0; z < spine_spec.nz; ++z)
    for (int y = 0; y < spine_spec.ny; ++y)
      for (int x = 0; x < spine_spec.nx; ++x) {
        if (sp.mask.labels(x, y, z) == 0) continue;
        for (const auto& [t, m] : fx.slice.raw_masks)
          if (m(x, y))
            infeasible("fixture: spine structure intersects the tissue pattern at (" +
                       std::to_string(x) + "," + std::to_string(y) + ")");
        fx.volume.hu(x, y, z) = sp.volume.hu(x, y, z);
      }

  fx.spine_mask = std::move(sp.mask);
  fx.spine_truth = std::move(sp.truth);
  return fx;
}

void write_series_fixture(const SeriesFixture& fx, const std::filesystem::path& series_dir,
                          const std::filesystem::path& mask_root,
                          const std::vector<int>& tissue_slices) {
  namespace fs = std::filesystem;
  fs::create_directories(series_dir);
  const fs::path mask_dir = mask_root / series_dir.filename();
  fs::create_directories(mask_dir);

  const auto& vol = fx.volume;
  char name[32];
  std::vector<uint16_t> stored(static_cast<size_t>(vol.nx()) * vol.ny());
  for (int z = 0; z < vol.nz(); ++z) {
    DicomWriteSpec ws;
    ws.rows = vol.ny();
    ws.cols = vol.nx();
    ws.pixel_spacing = {vol.spacing.y, vol.spacing.x};
    ws.position = {0.0, 0.0, z * vol.spacing.z};
    ws.instance_number = z + 1;
    ws.slice_thickness = vol.spacing.z;
    ws.rescale_slope = 1.0;
    ws.rescale_intercept = -1024.0;
    ws.sop_uid = ws.series_uid + "." + std::to_string(z + 1);
    for (int y = 0; y < vol.ny(); ++y)
      for (int x = 0; x < vol.nx(); ++x) {
        const double raw = std::llround(vol.hu(x, y, z) + 1024.0);
        stored[static_cast<size_t>(y) * vol.nx() + x] =
            static_cast<uint16_t>(std::clamp(raw, 0.0, 65535.0));
      }
    std::snprintf(name, sizeof(name), "slice_%04d.dcm", z);
    write_dicom_slice(series_dir / name, ws, stored);
  }

  save_nifti_mask(mask_dir / "spine.nii.gz", fx.spine_mask);

  std::vector<int> slices = tissue_slices;
  if (slices.empty())
    for (int z = 0; z < vol.nz(); ++z) slices.push_back(z);
  std::sort(slices.begin(), slices.end());
  slices.erase(std::unique(slices.begin(), slices.end()), slices.end());

  const auto tissue_map = default_tissue_label_map();
  SegmentationMask tm;
  tm.labels = Array3<int16_t>(vol.nx(), vol.ny(), 1);
  tm.label_map = tissue_map;
  tm.spacing = vol.spacing;
  for (int z : slices) {
    if (z < 0 || z >= vol.nz()) infeasible("fixture: tissue slice index out of range");
    tm.labels.fill(0);
    for (const auto& [t, m] : fx.slice.raw_masks) {
      int16_t id = 0;
      for (const auto& [lid, lname] : tissue_map)
        if (lname == tissue_name(t)) id = static_cast<int16_t>(lid);
      for (int y = 0; y < vol.ny(); ++y)
        for (int x = 0; x < vol.nx(); ++x)
          if (m(x, y)) tm.labels(x, y, 0) = id;
    }
    std::snprintf(name, sizeof(name), "slice_%04d_tissue.nii.gz", z);
    save_nifti_mask(mask_dir / name, tm);
  }
}

}  // namespace c2c
