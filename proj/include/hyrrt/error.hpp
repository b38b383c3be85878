#pragma once

#include <stdexcept>
#include <string>

namespace hyrrt {

enum class ErrorCode {
  kDimensionMismatch,
  kNonCompactDomain,
  kInvalidDomain,
  kParameterOutOfRange,
  kInitialStateOutsideFlowSet,
  kNotInJumpSet,
  kJumpMapUndefined,
  kConfigInvalid,
  kAssembledPlanInvalid,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kNonCompactDomain:
      return "NonCompactDomain";
    case ErrorCode::kInvalidDomain:
      return "InvalidDomain";
    case ErrorCode::kParameterOutOfRange:
      return "ParameterOutOfRange";
    case ErrorCode::kInitialStateOutsideFlowSet:
      return "InitialStateOutsideFlowSet";
    case ErrorCode::kNotInJumpSet:
      return "NotInJumpSet";
    case ErrorCode::kJumpMapUndefined:
      return "JumpMapUndefined";
    case ErrorCode::kConfigInvalid:
      return "ConfigInvalid";
    case ErrorCode::kAssembledPlanInvalid:
      return "AssembledPlanInvalid";
  }
  return "Unknown";
}

/// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hyrrt
