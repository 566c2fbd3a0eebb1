#pragma once

#include <map>
#include <optional>
#include <vector>

#include "c2c/types.hpp"

namespace c2c {

struct PostProcessConfig {
  int sat_hole_max_px = 200;
  int other_hole_max_px = 20;
  double imat_hu_low = -190.0;
  double imat_hu_high = -30.0;
  int imat_min_component_px = 10;
};

struct TissueMetrics {
  Tissue tissue = Tissue::muscle;
  double area_cm2 = 0.0;
  std::optional<double> mean_hu;  // absent when the tissue is empty
  long long pixel_count = 0;
};

using TissueMasks = std::map<Tissue, Array2<uint8_t>>;

// Background components (4-connected) that do not touch the image border and
// are smaller than the tissue's threshold become foreground.
Array2<uint8_t> fill_holes(const Array2<uint8_t>& mask, Tissue tissue,
                           const PostProcessConfig& cfg);

// Muscle pixels in the open HU interval become IMAT candidates; 8-connected
// candidate components under the size floor revert to muscle.
struct ImatSplit {
  Array2<uint8_t> muscle;
  Array2<uint8_t> imat;
};
ImatSplit relabel_imat(const Array2<uint8_t>& muscle_mask, const Array2<float>& hu_slice,
                       const PostProcessConfig& cfg);

// Drops 8-connected components smaller than the floor. Used for provider
// masks that already carry an imat channel.
Array2<uint8_t> filter_small_components(const Array2<uint8_t>& mask, int min_px);

// One entry per tissue in {muscle, imat, vat, sat}; missing masks count as
// empty.
std::vector<TissueMetrics> compute_metrics(const TissueMasks& masks, const Array2<float>& hu_slice,
                                           const Spacing& spacing);

struct SliceResult {
  TissueMasks masks;
  std::vector<TissueMetrics> metrics;
};

// Full per-slice chain: hole filling, imat handling, metrics. When the raw
// masks already include imat, the HU relabel is skipped and imat only gets
// the small-component filter.
SliceResult process_slice(const Array2<float>& hu_slice, const TissueMasks& raw_masks,
                          const Spacing& spacing, const PostProcessConfig& cfg);

}  // namespace c2c
