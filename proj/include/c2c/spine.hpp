#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "c2c/types.hpp"

namespace c2c {

struct SpineLevelResult {
  Level level = Level::T12;
  int rl_center_index = 0;              // sagittal slice (x index)
  std::pair<int, int> body_center_yz;   // centroid in the sagittal plane
  IVec3 roi_center;
  std::vector<IVec3> roi_voxels;        // sorted, unique
  double hu_statistic = 0.0;
  double si_mean_z = 0.0;               // exact mean z of the level's voxels
  int si_center_z = 0;                  // axial slice index
  std::filesystem::path si_center_path; // source file of that axial slice (may be empty)
  bool single_component = false;        // no spinous process seen on the sagittal slice
};

struct LevelSkip {
  Level level = Level::T12;
  std::string reason;
};

struct SpineAnalysis {
  std::vector<SpineLevelResult> results;  // superior -> inferior order
  std::vector<LevelSkip> skipped;
};

// Rounded mean x index of the level's voxels.
int rl_center_of_mass(const SegmentationMask& mask, Level level);

// On a sagittal slice (y fast axis, z slow), keep the vertebral body: of the
// two largest 8-connected components the more anterior one wins, the
// posterior one is taken to be the spinous process. A lone component is
// returned unchanged.
struct BodyIsolation {
  Array2<uint8_t> body;  // (y, z) plane
  bool single_component = false;
};
BodyIsolation isolate_vertebral_body(const Array2<uint8_t>& sagittal_fg);

// Rounded centroid (y, z) of the foreground.
std::pair<int, int> body_center_2d(const Array2<uint8_t>& body_mask);

// All voxels within the configured shape around `center`, measured in
// physical mm via the volume spacing. Sorted, unique. Throws if the center
// is outside the volume or the shape sticks out of it.
std::vector<IVec3> build_roi(const CTVolume& volume, IVec3 center, const RoiSpec& spec);

double roi_statistic(const CTVolume& volume, const std::vector<IVec3>& roi_voxels, RoiStat stat);

// Rounded mean z index over all of the level's voxels (processes included).
int superior_inferior_center(const SegmentationMask& mask, Level level);

// Full per-level chain; failing levels become skip records instead of
// aborting the whole spine.
SpineAnalysis analyze_spine(const CTVolume& volume, const SegmentationMask& spine_mask,
                            const RoiSpec& spec);

// Extracts the (y, z) sagittal plane of `mask` at x = plane_x, keeping only
// voxels of `level`.
Array2<uint8_t> sagittal_level_slice(const SegmentationMask& mask, Level level, int plane_x);

}  // namespace c2c
