#include "lowrank/errors.hpp"

namespace lowrank {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::TopBlockNotPD: return "TopBlockNotPD";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::DegenerateTopBlock: return "DegenerateTopBlock";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::TooManyClusters: return "TooManyClusters";
    case ErrorCode::EmptyBlock: return "EmptyBlock";
    case ErrorCode::ProjectionFailed: return "ProjectionFailed";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::SingularFisher: return "SingularFisher";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::EstimateUnavailable: return "EstimateUnavailable";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace lowrank
