#include "echoqm/errors.hpp"

namespace echoqm {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::ConfigValidation: return "ConfigValidation";
    case ErrorCode::BadHorizon: return "BadHorizon";
    case ErrorCode::TruncationOverflow: return "TruncationOverflow";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NonHermitianResult: return "NonHermitianResult";
    case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::ZeroPhotonProbe: return "ZeroPhotonProbe";
    case ErrorCode::MixedStateInput: return "MixedStateInput";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::NonPositiveData: return "NonPositiveData";
    case ErrorCode::AllRealizationsFailed: return "AllRealizationsFailed";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// 1 is left to generic failures and 2 to command-line usage errors.
int exit_code(ErrorCode code) { return 10 + static_cast<int>(code); }

}  // namespace echoqm
