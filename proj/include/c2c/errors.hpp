#pragma once

#include <stdexcept>
#include <string>

namespace c2c {

enum class Err {
  // volume ingestion
  MissingPixelSpacing,
  InconsistentSliceGeometry,
  NonUniformSliceSpacing,
  UnparseableFile,
  UnsupportedDatatype,
  OrientationUnresolvable,
  RootNotFound,
  // segmentation providers
  MaskNotFound,
  ShapeMismatch,
  RuntimeUnavailable,
  UnknownLabel,
  // spine analysis
  EmptyLevel,
  EmptySlice,
  EmptyMask,
  CenterOutOfBounds,
  RoiExceedsVolume,
  EmptyRoi,
  // tissue analysis
  MasksOverlap,
  // rendering
  FewerThanTwoCenters,
  PathOutOfBounds,
  // pipeline / io
  IoError,
  UsageError,
  // phantoms
  SpecInfeasible,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

}  // namespace c2c
