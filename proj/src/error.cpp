#include "commdeg/error.hpp"

namespace commdeg {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ClosureTooLarge: return "ClosureTooLarge";
    case ErrorCode::InvalidPermutation: return "InvalidPermutation";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::ForeignSubgroup: return "ForeignSubgroup";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::TrivialGroup: return "TrivialGroup";
    case ErrorCode::EmptyTuple: return "EmptyTuple";
    case ErrorCode::BruteCapExceeded: return "BruteCapExceeded";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotClassFunction: return "NotClassFunction";
    case ErrorCode::DegenerateEigenbasis: return "DegenerateEigenbasis";
    case ErrorCode::ToleranceExceeded: return "ToleranceExceeded";
    case ErrorCode::ImaginaryResidue: return "ImaginaryResidue";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

}  // namespace commdeg
