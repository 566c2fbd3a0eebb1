#pragma once

#include <filesystem>
#include <vector>

namespace c2c {

struct SeriesCandidate {
  std::filesystem::path directory;
  int file_count = 0;
  bool is_3d_eligible = false;
};

// Walks `root` recursively and returns one candidate per directory whose
// direct children are exclusively DICOM files (root itself included).
// A candidate is 3D-eligible when it holds more than `threshold` files.
// Results are in lexicographic path order regardless of filesystem
// enumeration order.
std::vector<SeriesCandidate> discover_series(const std::filesystem::path& root,
                                             int threshold = 300);

// All DICOM files under `root` (recursive), lexicographically sorted.
std::vector<std::filesystem::path> discover_dicom_files(const std::filesystem::path& root);

}  // namespace c2c
