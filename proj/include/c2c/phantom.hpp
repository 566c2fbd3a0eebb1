#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "c2c/tissue.hpp"
#include "c2c/types.hpp"

namespace c2c {

// Cylindrical vertebral body (axis along z) with a cortical shell, plus a
// rectangular posterior block standing in for the spinous process. All
// lengths in mm, positions are voxel-center coordinates.
struct PhantomLevel {
  Level level = Level::T12;
  double cx = 0.0, cy = 0.0, cz = 0.0;
  double body_radius = 14.0;
  double shell_thickness = 2.0;
  double half_height = 12.0;
  double trabecular_hu = 150.0;
  double cortical_hu = 400.0;
  // process block: centered at (cx, cy + process_offset, cz)
  double process_offset = 24.0;  // <= 0 disables the block
  double process_half_w = 5.0;
  double process_half_d = 4.0;
  double process_half_h = 10.0;
};

struct SpinePhantomSpec {
  int nx = 128, ny = 128, nz = 301;
  Spacing spacing;
  double background_hu = -800.0;
  double noise_sigma = 0.0;
  uint32_t noise_seed = 0;
  std::vector<PhantomLevel> levels;
};

struct SpineLevelTruth {
  Level level = Level::T12;
  IVec3 body_center;        // voxel, rounded analytic center
  double trabecular_hu = 0.0;
  double mean_x = 0.0;      // exact centroid of the level's labeled voxels
  double mean_z = 0.0;
  int rl_center_x = 0;
  int si_center_z = 0;
  long long voxel_count = 0;
};

struct SpinePhantom {
  CTVolume volume;
  SegmentationMask mask;
  std::vector<SpineLevelTruth> truth;
};

SpinePhantom generate_spine_phantom(const SpinePhantomSpec& spec);

// Concentric-ellipse slice: SAT annulus around a muscle ring around a VAT
// disk. Pockets are rectangles of off-HU pixels labeled muscle (IMAT bait);
// holes are rectangles carved out of one tissue's mask.
struct SlicePocket {
  int x0 = 0, y0 = 0, w = 0, h = 0;
  double hu = -100.0;
};

struct SliceHole {
  Tissue tissue = Tissue::sat;
  int x0 = 0, y0 = 0, w = 0, h = 0;
};

struct SlicePhantomSpec {
  int nx = 128, ny = 128;
  Spacing spacing;  // z unused
  double background_hu = -1000.0;
  double body_cx = 64.0, body_cy = 64.0;
  double body_a = 52.0, body_b = 44.0;  // outer ellipse semi-axes, pixels
  double sat_thickness = 8.0;
  double sat_hu = -105.0;
  double muscle_thickness = 10.0;
  double muscle_hu = 45.0;
  double vat_hu = -92.0;
  std::vector<SlicePocket> pockets;
  std::vector<SliceHole> holes;
};

struct SlicePhantom {
  Array2<float> hu;
  TissueMasks raw_masks;       // muscle, vat, sat as an ideal model would emit
  TissueMasks expected_masks;  // after the post-processing chain
  std::map<Tissue, long long> expected_counts;
  std::map<Tissue, double> expected_mean_hu;  // keys only for nonempty tissues
};

SlicePhantom generate_slice_phantom(const SlicePhantomSpec& spec);

// Plain text spec files (first token = key); see docs/phantom_format.md.
SpinePhantomSpec parse_spine_phantom_spec(const std::string& text);
SlicePhantomSpec parse_slice_phantom_spec(const std::string& text);

// Extrudes a slice phantom pattern into the spine phantom's HU volume for
// end-to-end fixtures: tissue pattern everywhere, vertebral structures
// superimposed. Tissue truth applies to every axial slice.
struct SeriesFixture {
  CTVolume volume;
  SegmentationMask spine_mask;
  std::vector<SpineLevelTruth> spine_truth;
  SlicePhantom slice;  // hu field matches any axial slice away from the spine
};

SeriesFixture make_series_fixture(const SpinePhantomSpec& spine_spec,
                                  const SlicePhantomSpec& slice_spec);

// Writes the fixture as a DICOM series directory plus provider mask files
// under <mask_root>/<series_name>/. Tissue masks are written for every
// slice whose index is in tissue_slices (empty = all slices).
void write_series_fixture(const SeriesFixture& fx, const std::filesystem::path& series_dir,
                          const std::filesystem::path& mask_root,
                          const std::vector<int>& tissue_slices = {});

}  // namespace c2c
