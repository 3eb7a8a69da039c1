#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lowrank {

enum class ErrorCode {
  AsymmetricInput,
  DimensionMismatch,
  NotOrthonormal,
  DomainViolation,
  TopBlockNotPD,
  RankMismatch,
  DegenerateTopBlock,
  NotPositiveDefinite,
  SingularGram,
  TooFewPoints,
  TooManyClusters,
  EmptyBlock,
  ProjectionFailed,
  ProbabilityOutOfRange,
  SingularFisher,
  SupportViolation,
  EnumerationTooLarge,
  EstimateUnavailable,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace lowrank
