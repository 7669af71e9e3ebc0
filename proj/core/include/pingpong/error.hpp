#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pingpong {

// Every failure mode that crosses a module boundary.  The CLI maps these onto
// stable exit codes, so do not renumber.
enum class ErrorCode {
  IndexOutOfRange = 1,
  BadIndex,
  BudgetExceeded,
  PrecisionExhausted,
  CriterionFails,
  VerificationFails,
  SeparationFails,
  NoneFound,
  NotSemisimple,
  NoGap,
  ExponentCapExceeded,
  GeneralPositionFails,
  PigeonholeFails,
  NotFound,
  ParseError,
  BadMatrix,
  ReplayMismatch,
  PreconditionViolated,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pingpong
