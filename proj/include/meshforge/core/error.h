#pragma once

#include <stdexcept>
#include <string>

namespace meshforge {

enum class ErrorCode {
  EmptyMesh,
  InvalidGeometry,
  OutOfBounds,
  EmptySurface,
  AllHidden,
  ChartFailure,
  PackOverflow,
  AtlasOverlap,
  ShapeMismatch,
  NothingToInpaint,
  ExportMismatch,
  InvalidConfig,
  IoError,
};

const char* errorCodeName(ErrorCode code);

// Pipeline error. Validation problems (bad inputs/config) map to CLI exit
// code 2, everything else to 3.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(errorCodeName(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

  bool isValidation() const {
    return code_ == ErrorCode::EmptyMesh || code_ == ErrorCode::InvalidGeometry ||
           code_ == ErrorCode::OutOfBounds || code_ == ErrorCode::InvalidConfig ||
           code_ == ErrorCode::ShapeMismatch || code_ == ErrorCode::ExportMismatch;
  }

 private:
  ErrorCode code_;
};

inline const char* errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::EmptySurface: return "EmptySurface";
    case ErrorCode::AllHidden: return "AllHidden";
    case ErrorCode::ChartFailure: return "ChartFailure";
    case ErrorCode::PackOverflow: return "PackOverflow";
    case ErrorCode::AtlasOverlap: return "AtlasOverlap";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NothingToInpaint: return "NothingToInpaint";
    case ErrorCode::ExportMismatch: return "ExportMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace meshforge
