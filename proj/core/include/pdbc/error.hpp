#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdbc {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kDegenerateMesh,
  kNonNested,
  kNonMonotone,
  kIncreasingStep,
  kUnknownProblem,
  kBreakdown,
  kMaxIterations,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code says what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures of an iterative method (as opposed to bad input).
  bool is_solver_failure() const noexcept {
    return code_ == ErrorCode::kBreakdown || code_ == ErrorCode::kMaxIterations;
  }

 private:
  ErrorCode code_;
};

}  // namespace pdbc
