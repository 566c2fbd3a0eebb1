#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "c2c/types.hpp"

namespace c2c {

// Reads a NIfTI-1 label volume (.nii or .nii.gz) and reorients it to the
// canonical (right-left, anterior-posterior, inferior-superior) axis order.
// Float data holding exact integers is accepted and cast.
SegmentationMask load_nifti_mask(const std::filesystem::path& file,
                                 const std::map<int, std::string>& label_map);

// Writes labels as int16 NIfTI-1 with an sform encoding the canonical frame.
// Gzip-compressed when the filename ends in .gz; output bytes are a pure
// function of the inputs.
void save_nifti_mask(const std::filesystem::path& file, const SegmentationMask& mask,
                     const Vec3& origin = {});

}  // namespace c2c
