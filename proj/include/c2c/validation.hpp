#pragma once

#include <map>
#include <string>
#include <vector>

#include "c2c/tissue.hpp"
#include "c2c/types.hpp"

namespace c2c {

// 2|a∩b| / (|a|+|b|); two empty masks compare equal (1.0).
double dice(const Array2<uint8_t>& a, const Array2<uint8_t>& b);
double dice3(const Array3<int16_t>& a, const Array3<int16_t>& b, int16_t label);

struct LevelComparison {
  Level level = Level::T12;
  double vertical_center_error_mm = 0.0;
  double roi_hu_error = 0.0;
  double roi_hu_pct_error = 0.0;
};

struct ValidationReport {
  std::vector<LevelComparison> levels;
  double mean_vertical_error_mm = 0.0;
  double median_vertical_error_mm = 0.0;
  double mean_hu_error = 0.0;
  double median_hu_error = 0.0;
  double mean_hu_pct_error = 0.0;
  double median_hu_pct_error = 0.0;
  std::map<Tissue, double> tissue_dice;  // filled by compare_tissue
};

// Per-level SI-center distance and the mean-HU gap between cubic ROIs placed
// by the same body-center procedure on both masks.
ValidationReport compare_spine(const SegmentationMask& pred, const SegmentationMask& ref,
                               const CTVolume& volume, int cubic_roi_px = 10);

ValidationReport compare_tissue(const TissueMasks& pred, const TissueMasks& ref);

std::string validation_report_csv(const ValidationReport& r);

}  // namespace c2c
