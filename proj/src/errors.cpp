#include "mpslearn/errors.hpp"

namespace mpslearn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonContiguousSupport: return "NonContiguousSupport";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::BadCut: return "BadCut";
    case ErrorCode::BlockOutOfRange: return "BlockOutOfRange";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::RankCapExceedsDim: return "RankCapExceedsDim";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::NegativeArgument: return "NegativeArgument";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::DegenerateD: return "DegenerateD";
    case ErrorCode::PlanInfeasible: return "PlanInfeasible";
    case ErrorCode::BackendTooLarge: return "BackendTooLarge";
    case ErrorCode::OracleFailure: return "OracleFailure";
    case ErrorCode::AuditDisabled: return "AuditDisabled";
    case ErrorCode::MalformedCircuit: return "MalformedCircuit";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace mpslearn
