#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ouint {

enum class ErrorCode {
  kDimensionMismatch,
  kNonFiniteEntry,
  kSingularMatrix,
  kNotSymmetric,
  kNotPositiveDefinite,
  kEmptyResult,
  kBadCoordinate,
  kSingularReducedMatrix,
  kDuplicateIntervention,
  kNoStationaryDistribution,
  kPreconditionViolated,
  kTooLarge,
  kEmptyGrid,
  kNonPositiveSteps,
  kIndexOutOfRange,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
/// `stage()` is set for errors raised while folding a sequence of
/// interventions and holds the 0-based position of the failing step.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<int> stage = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        detail_(what),
        stage_(stage) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<int> stage() const noexcept { return stage_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<int> stage_;
};

}  // namespace ouint
