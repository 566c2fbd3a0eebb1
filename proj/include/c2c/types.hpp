#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "c2c/grid.hpp"

namespace c2c {

// mm per voxel along (right-left, anterior-posterior, inferior-superior).
struct Spacing {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct IVec3 {
  int x = 0;
  int y = 0;
  int z = 0;

  auto operator<=>(const IVec3&) const = default;
};

// Rounding rule used throughout: half away from zero.
inline int round_half_away(double v) { return static_cast<int>(std::llround(v)); }

// Canonical axis order: x = right-left (increasing toward patient left),
// y = anterior-posterior (increasing toward posterior), z = inferior-superior
// (increasing toward superior). All modules assume this frame.
struct CTVolume {
  Array3<float> hu;
  Spacing spacing;
  Vec3 origin;
  std::vector<std::filesystem::path> source_paths;  // one per slice; empty for NIfTI source

  int nx() const { return hu.nx; }
  int ny() const { return hu.ny; }
  int nz() const { return hu.nz; }
};

struct SegmentationMask {
  Array3<int16_t> labels;
  std::map<int, std::string> label_map;  // label id -> semantic name
  Spacing spacing;

  int nx() const { return labels.nx; }
  int ny() const { return labels.ny; }
  int nz() const { return labels.nz; }

  bool has_class(const std::string& name) const {
    for (const auto& [id, n] : label_map)
      if (n == name) return true;
    return false;
  }
  std::optional<int> label_for(const std::string& name) const {
    for (const auto& [id, n] : label_map)
      if (n == name) return id;
    return std::nullopt;
  }
};

enum class Level : int { T12 = 0, L1, L2, L3, L4, L5 };

inline constexpr std::array<Level, 6> kLevels = {Level::T12, Level::L1, Level::L2,
                                                 Level::L3,  Level::L4, Level::L5};

inline const char* level_name(Level l) {
  switch (l) {
    case Level::T12: return "T12";
    case Level::L1: return "L1";
    case Level::L2: return "L2";
    case Level::L3: return "L3";
    case Level::L4: return "L4";
    case Level::L5: return "L5";
  }
  return "?";
}

std::optional<Level> level_from_name(const std::string& name);

// Stable label ids used when this package writes spine masks (T12=1 .. L5=6).
inline int level_label_id(Level l) { return static_cast<int>(l) + 1; }

inline std::map<int, std::string> default_spine_label_map() {
  std::map<int, std::string> m;
  for (Level l : kLevels) m[level_label_id(l)] = level_name(l);
  return m;
}

enum class Tissue : int { muscle = 0, imat, vat, sat };

inline constexpr std::array<Tissue, 4> kTissues = {Tissue::muscle, Tissue::imat, Tissue::vat,
                                                   Tissue::sat};

inline const char* tissue_name(Tissue t) {
  switch (t) {
    case Tissue::muscle: return "muscle";
    case Tissue::imat: return "imat";
    case Tissue::vat: return "vat";
    case Tissue::sat: return "sat";
  }
  return "?";
}

std::optional<Tissue> tissue_from_name(const std::string& name);

// Default label ids for tissue masks written/read by this package.
inline std::map<int, std::string> default_tissue_label_map() {
  return {{1, "muscle"}, {2, "vat"}, {3, "sat"}, {4, "imat"}};
}

enum class RoiShape { sphere, cube };
enum class RoiStat { median, mean };

struct RoiSpec {
  RoiShape shape = RoiShape::sphere;
  double diameter_mm = 10.0;
  RoiStat statistic = RoiStat::median;
};

}  // namespace c2c
