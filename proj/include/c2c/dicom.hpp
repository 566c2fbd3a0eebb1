#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "c2c/types.hpp"

namespace c2c {

// One parsed DICOM file, reduced to the fields this engine consumes.
struct DicomSlice {
  std::filesystem::path path;
  int rows = 0;
  int cols = 0;
  std::optional<std::array<double, 2>> pixel_spacing;  // row (y), column (x) in mm
  std::optional<std::array<double, 3>> position;       // ImagePositionPatient, LPS mm
  std::optional<std::array<double, 6>> orientation;    // ImageOrientationPatient
  std::optional<long> instance_number;
  std::optional<double> slice_thickness;
  double rescale_slope = 1.0;
  double rescale_intercept = 0.0;
  bool has_rescale = false;
  int bits_allocated = 0;
  int pixel_representation = 0;
  int samples_per_pixel = 1;
  std::vector<uint8_t> pixel_data;  // raw stored values, little endian

  // Stored value at (x=col, y=row) after sign handling, before rescale.
  double stored_value(int x, int y) const;
  float hu_value(int x, int y) const {
    return static_cast<float>(rescale_slope * stored_value(x, y) + rescale_intercept);
  }
};

// Parses one DICOM file. Handles implicit/explicit VR little endian and the
// deflated explicit VR transfer syntax; compressed pixel data is rejected.
DicomSlice parse_dicom_file(const std::filesystem::path& path);

// DICM magic at offset 128, with a permissive fallback parse attempt for
// headerless files (clinical exports frequently drop the preamble).
bool is_dicom_file(const std::filesystem::path& path);
bool is_dicom_bytes(const std::vector<uint8_t>& bytes);

CTVolume load_dicom_series(const std::filesystem::path& dir);
CTVolume load_axial_dicom(const std::filesystem::path& file);

// --- fixture emission ------------------------------------------------------

struct DicomWriteSpec {
  int rows = 0;
  int cols = 0;
  std::array<double, 2> pixel_spacing = {1.0, 1.0};  // row, column
  std::array<double, 3> position = {0.0, 0.0, 0.0};
  long instance_number = 1;
  double slice_thickness = 1.0;
  double rescale_slope = 1.0;
  double rescale_intercept = 0.0;
  bool signed_pixels = false;
  std::string series_uid = "1.2.826.0.1.3680043.9756.1";
  std::string sop_uid = "1.2.826.0.1.3680043.9756.1.1";
};

// Writes a single-frame CT slice, explicit VR little endian. `stored` holds
// raw stored values laid out row-major (x fastest).
void write_dicom_slice(const std::filesystem::path& path, const DicomWriteSpec& spec,
                       const std::vector<uint16_t>& stored);

}  // namespace c2c
