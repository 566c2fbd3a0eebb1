#include "c2c/errors.hpp"
#include "c2c/types.hpp"

namespace c2c {

const char* err_name(Err e) {
  switch (e) {
    case Err::MissingPixelSpacing: return "MissingPixelSpacing";
    case Err::InconsistentSliceGeometry: return "InconsistentSliceGeometry";
    case Err::NonUniformSliceSpacing: return "NonUniformSliceSpacing";
    case Err::UnparseableFile: return "UnparseableFile";
    case Err::UnsupportedDatatype: return "UnsupportedDatatype";
    case Err::OrientationUnresolvable: return "OrientationUnresolvable";
    case Err::RootNotFound: return "RootNotFound";
    case Err::MaskNotFound: return "MaskNotFound";
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::RuntimeUnavailable: return "RuntimeUnavailable";
    case Err::UnknownLabel: return "UnknownLabel";
    case Err::EmptyLevel: return "EmptyLevel";
    case Err::EmptySlice: return "EmptySlice";
    case Err::EmptyMask: return "EmptyMask";
    case Err::CenterOutOfBounds: return "CenterOutOfBounds";
    case Err::RoiExceedsVolume: return "RoiExceedsVolume";
    case Err::EmptyRoi: return "EmptyRoi";
    case Err::MasksOverlap: return "MasksOverlap";
    case Err::FewerThanTwoCenters: return "FewerThanTwoCenters";
    case Err::PathOutOfBounds: return "PathOutOfBounds";
    case Err::IoError: return "IoError";
    case Err::UsageError: return "UsageError";
    case Err::SpecInfeasible: return "SpecInfeasible";
  }
  return "UnknownError";
}

std::optional<Level> level_from_name(const std::string& s) {
  for (Level l : kLevels)
    if (s == level_name(l)) return l;
  return std::nullopt;
}

std::optional<Tissue> tissue_from_name(const std::string& s) {
  for (Tissue t : kTissues)
    if (s == tissue_name(t)) return t;
  return std::nullopt;
}

}  // namespace c2c
