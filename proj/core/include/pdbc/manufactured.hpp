#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pdbc/control.hpp"
#include "pdbc/parabolic.hpp"

namespace pdbc {

/// A state problem with known solution. `data.u` holds the trace of `exact`.
struct StateProblem {
  std::string id;
  ProblemData data;
  SpaceTimeFunction exact;
  double horizon = 1.0;
};

/// Largest |dy/dt - Laplace y - f| over `samples` pseudo-random points of
/// (0.1, T] x Omega, with y, f taken from the problem and derivatives by
/// central differences.
double manufactured_residual(const StateProblem& problem, int samples = 10);

/// Tolerance of the finite-difference gate applied by manufactured_state_problem.
inline constexpr double kManufacturedGateTol = 1e-6;

/// Ids: "smooth-inhomogeneous" (y = exp(-t)(x^2 + y^2)), "rough-boundary"
/// (y = erfc(x / (2 sqrt t)), zero initial value), "constant" (y = 1.5).
/// Each problem passes the finite-difference gate before it is returned;
/// a failing gate throws Error(kInvalidArgument). Unknown ids throw
/// Error(kUnknownProblem).
StateProblem manufactured_state_problem(std::string_view id);
std::vector<std::string> state_problem_ids();

/// Control test problem: f, y0, target, alpha and bounds, without a mesh.
struct ControlSetup {
  std::string id;
  ControlProblem problem;
  double horizon = 1.0;
};

/// Ids: "active-box" (zero f and y0, oscillating target, alpha 0.1, bounds
/// [-0.5, 0.5] active on part of the boundary) and "unconstrained" (same
/// data without bounds).
ControlSetup manufactured_control_problem(std::string_view id);
std::vector<std::string> control_problem_ids();

}  // namespace pdbc
