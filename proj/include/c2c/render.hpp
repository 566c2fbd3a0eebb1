#pragma once

#include <optional>
#include <string>
#include <vector>

#include "c2c/cpr.hpp"
#include "c2c/font.hpp"
#include "c2c/png_io.hpp"
#include "c2c/tissue.hpp"
#include "c2c/types.hpp"

namespace c2c {

struct OverlayStyle {
  double alpha = 0.5;
  double axial_window = 400.0;
  double axial_level = 50.0;
  double cpr_window = 1800.0;
  double cpr_level = 400.0;
};

RGB tissue_color(Tissue t);
RGB level_color(Level l);

uint8_t window_hu(double hu, double window, double level);
Array2<uint8_t> window_image(const Array2<float>& hu, double window, double level);

// Per-level CPR annotation, in voxel coordinates of the rendered volume.
struct CprAnnotation {
  Level level = Level::T12;
  Vec3 roi_center;
  double roi_radius_px = 5.0;
  RoiShape shape = RoiShape::sphere;
  double si_center_z = 0.0;
  double hu_statistic = 0.0;
};

// Windowed CPR with ROI outlines, dashed per-level SI-center lines and the
// HU statistic block in the upper right corner.
ImageRGB render_cpr(const CTVolume& volume, const CprPath& path,
                    const std::vector<CprAnnotation>& annotations, const OverlayStyle& style,
                    CprPlane plane);

// The exact strings burned into axial overlays (one per tissue).
std::vector<std::string> format_metrics_lines(const std::vector<TissueMetrics>& metrics);

// Level border and label are omitted when no level applies (2D pipeline).
ImageRGB render_axial_overlay(const Array2<float>& hu_slice, const TissueMasks& masks,
                              const std::vector<TissueMetrics>& metrics,
                              std::optional<Level> level, const OverlayStyle& style);

}  // namespace c2c
