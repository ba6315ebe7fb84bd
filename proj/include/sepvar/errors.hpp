#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sepvar {

enum class ErrorCode {
  DimensionMismatch,
  NonUnitLeading,
  FiberDegreeTooLow,
  DivisibilityError,
  NotNatural,
  TruncationInsufficient,
  DegenerateHessian,
  InconsistentRecursion,
  UnknownPreset,
  SharedBodyViolation,
  ShapeViolation,
  PurityViolation,
  JacobiViolation,
  ParseError,
  UsageError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonUnitLeading: return "NonUnitLeading";
    case ErrorCode::FiberDegreeTooLow: return "FiberDegreeTooLow";
    case ErrorCode::DivisibilityError: return "DivisibilityError";
    case ErrorCode::NotNatural: return "NotNatural";
    case ErrorCode::TruncationInsufficient: return "TruncationInsufficient";
    case ErrorCode::DegenerateHessian: return "DegenerateHessian";
    case ErrorCode::InconsistentRecursion: return "InconsistentRecursion";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::SharedBodyViolation: return "SharedBodyViolation";
    case ErrorCode::ShapeViolation: return "ShapeViolation";
    case ErrorCode::PurityViolation: return "PurityViolation";
    case ErrorCode::JacobiViolation: return "JacobiViolation";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

/// Every failure raised by the engine carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace sepvar
