#include "c2c/tissue.hpp"

#include <algorithm>

#include "c2c/errors.hpp"
#include "c2c/image_ops.hpp"

namespace c2c {

namespace {

void check_shape(const Array2<uint8_t>& m, const Array2<float>& s) {
  if (m.w != s.w || m.h != s.h)
    fail(Err::ShapeMismatch, "mask " + std::to_string(m.w) + "x" + std::to_string(m.h) +
                                 " vs slice " + std::to_string(s.w) + "x" + std::to_string(s.h));
}

}  // namespace

Array2<uint8_t> fill_holes(const Array2<uint8_t>& mask, Tissue tissue,
                           const PostProcessConfig& cfg) {
  const int threshold = tissue == Tissue::sat ? cfg.sat_hole_max_px : cfg.other_hole_max_px;
  Array2<uint8_t> bg(mask.w, mask.h);
  for (size_t i = 0; i < mask.v.size(); ++i) bg.v[i] = mask.v[i] ? 0 : 1;

  Array2<int32_t> labels;
  const auto comps = label_components_2d(bg, 4, labels);

  Array2<uint8_t> out = mask;
  for (const auto& c : comps) {
    if (c.touches_border || c.area >= threshold) continue;
    for (size_t i = 0; i < labels.v.size(); ++i)
      if (labels.v[i] == c.label) out.v[i] = 1;
  }
  return out;
}

ImatSplit relabel_imat(const Array2<uint8_t>& muscle_mask, const Array2<float>& hu_slice,
                       const PostProcessConfig& cfg) {
  check_shape(muscle_mask, hu_slice);

  Array2<uint8_t> cand(muscle_mask.w, muscle_mask.h);
  for (size_t i = 0; i < cand.v.size(); ++i) {
    const double hu = hu_slice.v[i];
    cand.v[i] = muscle_mask.v[i] && hu > cfg.imat_hu_low && hu < cfg.imat_hu_high ? 1 : 0;
  }

  Array2<int32_t> labels;
  const auto comps = label_components_2d(cand, 8, labels);

  ImatSplit out;
  out.muscle = muscle_mask;
  out.imat = Array2<uint8_t>(muscle_mask.w, muscle_mask.h);
  for (const auto& c : comps) {
    if (c.area < cfg.imat_min_component_px) continue;  // too small: stays muscle
    for (size_t i = 0; i < labels.v.size(); ++i)
      if (labels.v[i] == c.label) {
        out.imat.v[i] = 1;
        out.muscle.v[i] = 0;
      }
  }
  return out;
}

Array2<uint8_t> filter_small_components(const Array2<uint8_t>& mask, int min_px) {
  Array2<int32_t> labels;
  const auto comps = label_components_2d(mask, 8, labels);
  Array2<uint8_t> out = mask;
  for (const auto& c : comps) {
    if (c.area >= min_px) continue;
    for (size_t i = 0; i < labels.v.size(); ++i)
      if (labels.v[i] == c.label) out.v[i] = 0;
  }
  return out;
}

std::vector<TissueMetrics> compute_metrics(const TissueMasks& masks, const Array2<float>& hu_slice,
                                           const Spacing& spacing) {
  for (auto it = masks.begin(); it != masks.end(); ++it) {
    check_shape(it->second, hu_slice);
    for (auto jt = std::next(it); jt != masks.end(); ++jt)
      for (size_t i = 0; i < it->second.v.size(); ++i)
        if (it->second.v[i] && jt->second.v[i])
          fail(Err::MasksOverlap, std::string(tissue_name(it->first)) + " and " +
                                      tissue_name(jt->first) + " overlap at pixel " +
                                      std::to_string(i));
  }

  std::vector<TissueMetrics> out;
  for (Tissue t : kTissues) {
    TissueMetrics m;
    m.tissue = t;
    auto it = masks.find(t);
    if (it != masks.end()) {
      double acc = 0.0;
      for (size_t i = 0; i < it->second.v.size(); ++i)
        if (it->second.v[i]) {
          ++m.pixel_count;
          acc += hu_slice.v[i];
        }
      if (m.pixel_count > 0) m.mean_hu = acc / static_cast<double>(m.pixel_count);
    }
    m.area_cm2 = static_cast<double>(m.pixel_count) * spacing.x * spacing.y / 100.0;
    out.push_back(m);
  }
  return out;
}

SliceResult process_slice(const Array2<float>& hu_slice, const TissueMasks& raw_masks,
                          const Spacing& spacing, const PostProcessConfig& cfg) {
  for (const char* need : {"muscle", "vat", "sat"}) {
    const Tissue t = *tissue_from_name(need);
    if (raw_masks.find(t) == raw_masks.end())
      fail(Err::EmptyMask, std::string("raw masks missing ") + need);
  }
  for (const auto& [t, m] : raw_masks) check_shape(m, hu_slice);

  // Input masks must already be disjoint.
  for (auto it = raw_masks.begin(); it != raw_masks.end(); ++it)
    for (auto jt = std::next(it); jt != raw_masks.end(); ++jt)
      for (size_t i = 0; i < it->second.v.size(); ++i)
        if (it->second.v[i] && jt->second.v[i])
          fail(Err::MasksOverlap, std::string("raw ") + tissue_name(it->first) + " and " +
                                      tissue_name(jt->first) + " overlap");

  const bool native_imat = raw_masks.find(Tissue::imat) != raw_masks.end();

  // Hole filling may try to claim pixels that belong to another tissue (a
  // small compartment fully enclosed by a ring reads as a hole of the ring's
  // mask). Filled pixels keep first-come priority in kTissues order and never
  // override another tissue's original pixels, so the masks stay disjoint.
  Array2<uint8_t> original_any(hu_slice.w, hu_slice.h);
  for (const auto& [t, m] : raw_masks)
    for (size_t i = 0; i < m.v.size(); ++i)
      if (m.v[i]) original_any.v[i] = 1;

  TissueMasks filled;
  Array2<uint8_t> claimed(hu_slice.w, hu_slice.h);
  for (Tissue t : kTissues) {
    auto it = raw_masks.find(t);
    if (it == raw_masks.end()) continue;
    Array2<uint8_t> f = fill_holes(it->second, t, cfg);
    for (size_t i = 0; i < f.v.size(); ++i) {
      if (!f.v[i] || it->second.v[i]) continue;  // only newly filled pixels
      if (original_any.v[i] || claimed.v[i]) {
        f.v[i] = 0;
      } else {
        claimed.v[i] = 1;
      }
    }
    filled[t] = std::move(f);
  }

  SliceResult out;
  if (native_imat) {
    out.masks = filled;
    out.masks[Tissue::imat] = filter_small_components(filled[Tissue::imat], cfg.imat_min_component_px);
  } else {
    ImatSplit split = relabel_imat(filled[Tissue::muscle], hu_slice, cfg);
    out.masks = filled;
    out.masks[Tissue::muscle] = std::move(split.muscle);
    out.masks[Tissue::imat] = std::move(split.imat);
  }
  out.metrics = compute_metrics(out.masks, hu_slice, spacing);
  return out;
}

}  // namespace c2c
