#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "c2c/types.hpp"

namespace c2c {

enum class SegTarget { spine_3d, tissue_2d };

struct SegmentationRequest {
  SegTarget target = SegTarget::spine_3d;
  const CTVolume* volume = nullptr;
  std::string model_id = "stanford_v0.0.1";
  // Identity of the source data, used by the mask_files provider to locate
  // precomputed masks. Derived from volume->source_paths when left empty.
  std::string series_dir_name;
  std::string slice_stem;  // tissue_2d only
};

enum class ProviderKind { mask_files, onnx_runtime };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::mask_files;
  std::filesystem::path mask_root;   // mask_files
  std::filesystem::path model_path;  // onnx_runtime
  // model label id -> semantic name; empty selects the default map for the
  // request target.
  std::map<int, std::string> class_map;
};

struct ProviderStatus {
  std::string kind;
  bool ready = false;
  std::string reason;  // set when not ready
};

// Small key-value description shipped next to a model file: input grid,
// HU display window, and channel names.
struct ModelManifest {
  int input_rows = 0;
  int input_cols = 0;
  double hu_low = 0.0;
  double hu_high = 0.0;
  std::map<int, std::string> channels;
};

SegmentationMask segment(const SegmentationRequest& req, const ProviderConfig& cfg);

std::vector<ProviderStatus> available_providers(const std::filesystem::path& model_path = {});

ModelManifest parse_model_manifest_text(const std::string& text);
ModelManifest load_model_manifest(const std::filesystem::path& file);

}  // namespace c2c
