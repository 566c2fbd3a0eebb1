#pragma once

#include <filesystem>
#include <string>

#include "c2c/tissue.hpp"

namespace c2c {

// Layout: one group named after the model id, holding 2D uint8 datasets
// imat, muscle, sat, vat. Object timestamps are suppressed so identical
// masks produce identical files.
void write_level_seg_h5(const std::filesystem::path& path, const std::string& model_id,
                        const TissueMasks& masks);

TissueMasks read_level_seg_h5(const std::filesystem::path& path, const std::string& model_id);

}  // namespace c2c
