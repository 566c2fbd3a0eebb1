#include "c2c/discovery.hpp"

#include <algorithm>

#include "c2c/dicom.hpp"
#include "c2c/errors.hpp"

namespace c2c {

namespace {

void collect_dirs(const std::filesystem::path& root, std::vector<std::filesystem::path>& out) {
  out.push_back(root);
  for (const auto& e : std::filesystem::directory_iterator(root)) {
    if (e.is_directory() && !e.is_symlink()) collect_dirs(e.path(), out);
  }
}

}  // namespace

std::vector<SeriesCandidate> discover_series(const std::filesystem::path& root, int threshold) {
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec))
    fail(Err::RootNotFound, root.string());

  std::vector<std::filesystem::path> dirs;
  collect_dirs(root, dirs);
  std::sort(dirs.begin(), dirs.end());

  std::vector<SeriesCandidate> out;
  for (const auto& dir : dirs) {
    int count = 0;
    bool only_dicom = true;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      // any non-DICOM child, subdirectories included, disqualifies the dir
      if (!e.is_regular_file() || !is_dicom_file(e.path())) {
        only_dicom = false;
        break;
      }
      ++count;
    }
    if (!only_dicom || count == 0) continue;
    SeriesCandidate c;
    c.directory = dir;
    c.file_count = count;
    c.is_3d_eligible = count > threshold;
    out.push_back(c);
  }
  return out;
}

std::vector<std::filesystem::path> discover_dicom_files(const std::filesystem::path& root) {
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) fail(Err::RootNotFound, root.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && is_dicom_file(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace c2c
