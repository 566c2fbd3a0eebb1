#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "c2c/seg_provider.hpp"
#include "c2c/spine.hpp"
#include "c2c/tissue.hpp"
#include "c2c/types.hpp"

namespace c2c {

struct RunConfig {
  enum class Mode { process_3d, process_2d };
  Mode mode = Mode::process_3d;
  std::filesystem::path input_path;
  std::filesystem::path output_root;  // empty: $C2C_OUTPUT_ROOT, then ./outputs
  RoiSpec roi;
  PostProcessConfig post;
  ProviderConfig provider;
  int workers = 1;
  std::string tissue_model_id = "stanford_v0.0.1";
  std::string spine_model_id = "totalsegmentator_spine";
  bool save_images = true;
  int series_file_threshold = 300;
};

struct SeriesRecord {
  std::string input;   // series directory (3d) or DICOM file (2d)
  std::string subdir;  // output subdirectory, relative to the run dir
  std::string status;  // ok | ok-with-warnings | failed
  std::string reason;  // failed only
  std::vector<std::string> warnings;
  std::vector<std::string> emitted;  // run-dir relative paths, sorted
};

struct RunManifest {
  std::string run_dir;  // directory name (date-time format)
  std::filesystem::path run_path;
  std::string mode;
  std::vector<SeriesRecord> records;

  bool all_ok() const {
    for (const auto& r : records)
      if (r.status == "failed") return false;
    return !records.empty();
  }
};

RunManifest run_pipeline_3d(const RunConfig& cfg);
RunManifest run_pipeline_2d(const RunConfig& cfg);

void write_manifest_json(const std::filesystem::path& path, const RunManifest& m);

std::filesystem::path resolve_output_root(const RunConfig& cfg);

// <Y>-<m>-<d>_<H>-<M>-<S>, suffixed -2, -3, ... on collision.
std::filesystem::path create_run_dir(const std::filesystem::path& root);

// Axial slice index nearest to the level's mean z; an exact tie picks the
// inferior slice.
int pick_axial_index(double mean_z, int nz);

std::string metrics_csv_header_3d();
std::string metrics_csv_header_2d();

struct LevelMetricsRow {
  Level level = Level::T12;
  std::string dicom_path;
  double spine_roi_hu = 0.0;
  std::vector<TissueMetrics> tissue;  // kTissues order
};

std::string metrics_csv_3d(const std::vector<LevelMetricsRow>& rows);

// Splits a labeled tissue mask into per-tissue binaries by semantic name;
// labels without a tissue name (e.g. a bone channel) are dropped.
TissueMasks tissue_masks_from(const SegmentationMask& mask);

}  // namespace c2c
