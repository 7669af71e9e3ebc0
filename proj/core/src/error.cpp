#include "pingpong/error.hpp"

namespace pingpong {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::CriterionFails: return "CriterionFails";
    case ErrorCode::VerificationFails: return "VerificationFails";
    case ErrorCode::SeparationFails: return "SeparationFails";
    case ErrorCode::NoneFound: return "NoneFound";
    case ErrorCode::NotSemisimple: return "NotSemisimple";
    case ErrorCode::NoGap: return "NoGap";
    case ErrorCode::ExponentCapExceeded: return "ExponentCapExceeded";
    case ErrorCode::GeneralPositionFails: return "GeneralPositionFails";
    case ErrorCode::PigeonholeFails: return "PigeonholeFails";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BadMatrix: return "BadMatrix";
    case ErrorCode::ReplayMismatch: return "ReplayMismatch";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
  }
  return "Unknown";
}

}  // namespace pingpong
