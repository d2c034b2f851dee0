#pragma once

#include <stdexcept>
#include <string>

namespace riskdec {

// One exception type for the whole library; the code tells callers (and the
// CLI exit-code mapping) which contract was broken.
enum class ErrorCode {
  MalformedProblem,
  NumericalFailure,
  UnboundedProblem,
  NodeLimitExceeded,
  IterationLimit,
  TimeLimit,
  ParseError,
  SchemaVersionMismatch,
  EmptyScalarizationSet,
  EmptyVertexSet,
  DimensionCapExceeded,
  NotPointed,
  InvalidRay,
  TightnessViolation,
  IntegralityPresent,
  InstanceContractViolation,
  InvalidArgument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::MalformedProblem: return "MalformedProblem";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::UnboundedProblem: return "UnboundedProblem";
    case ErrorCode::NodeLimitExceeded: return "NodeLimitExceeded";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::TimeLimit: return "TimeLimit";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::EmptyScalarizationSet: return "EmptyScalarizationSet";
    case ErrorCode::EmptyVertexSet: return "EmptyVertexSet";
    case ErrorCode::DimensionCapExceeded: return "DimensionCapExceeded";
    case ErrorCode::NotPointed: return "NotPointed";
    case ErrorCode::InvalidRay: return "InvalidRay";
    case ErrorCode::TightnessViolation: return "TightnessViolation";
    case ErrorCode::IntegralityPresent: return "IntegralityPresent";
    case ErrorCode::InstanceContractViolation: return "InstanceContractViolation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace riskdec
