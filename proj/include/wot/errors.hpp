#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wot {

enum class ErrorCode {
  NegativeMass,
  BadInterval,
  OutOfRange,
  MassMismatch,
  MassOrder,
  UnboundedHull,
  Unbounded,
  NotInD,
  InternalInconsistency,
  MarginalMismatch,
  OrderViolation,
  DimensionMismatch,
  NegativeRemainder,
  BadOrder,
  BadCost,
  LpInfeasible,
  NumericalFailure,
  Parse,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::MassOrder: return "MassOrder";
    case ErrorCode::UnboundedHull: return "UnboundedHull";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::NotInD: return "NotInD";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::MarginalMismatch: return "MarginalMismatch";
    case ErrorCode::OrderViolation: return "OrderViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeRemainder: return "NegativeRemainder";
    case ErrorCode::BadOrder: return "BadOrder";
    case ErrorCode::BadCost: return "BadCost";
    case ErrorCode::LpInfeasible: return "LpInfeasible";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Thrown by every library operation on a contract violation.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  /// Errors that indicate a bug or numerical drift rather than bad input.
  bool is_internal() const noexcept {
    return code_ == ErrorCode::InternalInconsistency ||
           code_ == ErrorCode::NegativeRemainder ||
           code_ == ErrorCode::LpInfeasible ||
           code_ == ErrorCode::NumericalFailure;
  }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace wot
