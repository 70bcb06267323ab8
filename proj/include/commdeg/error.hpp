#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace commdeg {

enum class ErrorCode {
  ClosureTooLarge,
  InvalidPermutation,
  UnknownFamily,
  ForeignSubgroup,
  NotNormal,
  TrivialGroup,
  EmptyTuple,
  BruteCapExceeded,
  InvalidArgument,
  NotClassFunction,
  DegenerateEigenbasis,
  ToleranceExceeded,
  ImaginaryResidue,
  ConfigInvalid,
  ParseError,
};

std::string_view error_code_name(ErrorCode code);

/// Every library failure surfaces as this exception; code() is stable across
/// releases and is what the CLI maps to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace commdeg
