#pragma once

#include <stdexcept>
#include <string>

namespace zkl {

enum class ErrorKind {
  InvalidArgument,
  DensityFloorViolated,
  NoConvergence,
  MonotonicityViolated,
  CFLViolation,
  InconsistentProfiles,
  FrameMismatch,
  ResonantRoot,
  ParseError,
  ValidationError,
  IoError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (the harness in particular) can report which invariant broke.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DensityFloorViolated: return "DensityFloorViolated";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::MonotonicityViolated: return "MonotonicityViolated";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::InconsistentProfiles: return "InconsistentProfiles";
    case ErrorKind::FrameMismatch: return "FrameMismatch";
    case ErrorKind::ResonantRoot: return "ResonantRoot";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace zkl
