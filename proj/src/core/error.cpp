#include "fbsim/error.hpp"

namespace fbsim {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::BadZeros: return "BadZeros";
    case ErrorCode::StepRejected: return "StepRejected";
    case ErrorCode::NeedsTwoTimes: return "NeedsTwoTimes";
    case ErrorCode::BadTestFunction: return "BadTestFunction";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TimeBoundary: return "TimeBoundary";
    case ErrorCode::TooCoarse: return "TooCoarse";
    case ErrorCode::DegenerateJump: return "DegenerateJump";
    case ErrorCode::SchemeError: return "SchemeError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace fbsim
