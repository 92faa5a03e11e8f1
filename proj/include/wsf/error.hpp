#pragma once

#include <stdexcept>
#include <string>

namespace wsf {

enum class ErrorCode {
  InvalidInput,      // malformed file or flag
  InvalidParameter,
  UnknownVertex,
  SelfLoop,
  DuplicateEdge,
  NonpositiveConductance,
  DisconnectedGraph,
  MissingTailRule,
  RecurrentTail,
  RecurrentProfile,
  NotAFlow,
  UnsupportedDepth,
  EnumerationTooLarge,
  ZeroSurvival,
  RejectionBudgetExceeded,
  DegenerateConditioning,
  CoordinateMismatch,
  NumericalDegeneracy,
  InsufficientData,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::NonpositiveConductance: return "NonpositiveConductance";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::MissingTailRule: return "MissingTailRule";
    case ErrorCode::RecurrentTail: return "RecurrentTail";
    case ErrorCode::RecurrentProfile: return "RecurrentProfile";
    case ErrorCode::NotAFlow: return "NotAFlow";
    case ErrorCode::UnsupportedDepth: return "UnsupportedDepth";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::ZeroSurvival: return "ZeroSurvival";
    case ErrorCode::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorCode::DegenerateConditioning: return "DegenerateConditioning";
    case ErrorCode::CoordinateMismatch: return "CoordinateMismatch";
    case ErrorCode::NumericalDegeneracy: return "NumericalDegeneracy";
    case ErrorCode::InsufficientData: return "InsufficientData";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace wsf
