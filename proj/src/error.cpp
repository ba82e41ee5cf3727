#include "ouint/error.hpp"

namespace ouint {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kNotSymmetric: return "NotSymmetric";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kEmptyResult: return "EmptyResult";
    case ErrorCode::kBadCoordinate: return "BadCoordinate";
    case ErrorCode::kSingularReducedMatrix: return "SingularReducedMatrix";
    case ErrorCode::kDuplicateIntervention: return "DuplicateIntervention";
    case ErrorCode::kNoStationaryDistribution: return "NoStationaryDistribution";
    case ErrorCode::kPreconditionViolated: return "PreconditionViolated";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kEmptyGrid: return "EmptyGrid";
    case ErrorCode::kNonPositiveSteps: return "NonPositiveSteps";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace ouint
