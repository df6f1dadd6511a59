#pragma once

#include <stdexcept>
#include <string>

namespace fbsim {

enum class ErrorCode {
  InvalidArgument,
  IterationLimit,
  GridTooSmall,
  DomainError,
  NotApplicable,
  StepUnderflow,
  BadZeros,
  StepRejected,
  NeedsTwoTimes,
  BadTestFunction,
  NotMonotone,
  NoSignChange,
  OutOfRange,
  TimeBoundary,
  TooCoarse,
  DegenerateJump,
  SchemeError,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// C API maps them one-to-one onto fbsim_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace fbsim
