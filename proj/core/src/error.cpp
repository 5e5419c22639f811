#include "pdbc/error.hpp"

namespace pdbc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kDegenerateMesh: return "degenerate-mesh";
    case ErrorCode::kNonNested: return "non-nested";
    case ErrorCode::kNonMonotone: return "non-monotone";
    case ErrorCode::kIncreasingStep: return "increasing-step";
    case ErrorCode::kUnknownProblem: return "unknown-problem";
    case ErrorCode::kBreakdown: return "breakdown";
    case ErrorCode::kMaxIterations: return "max-iterations";
  }
  return "unknown";
}

}  // namespace pdbc
