#pragma once

#include <limits>
#include <variant>
#include <vector>

#include "pdbc/error.hpp"
#include "pdbc/fields.hpp"
#include "pdbc/parabolic.hpp"

namespace pdbc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Box [lower, upper] for the control coefficients; either side may be infinite.
struct ControlBounds {
  double lower = -kInf;
  double upper = kInf;

  /// Throws Error(kInvalidArgument) unless lower < upper.
  void validate() const;
};

/// Tracking-type Dirichlet boundary control problem
///   min 1/2 ||y - y_d||_I^2 + alpha/2 ||u||_Sigma^2,  lower <= u <= upper.
/// The target is either a function (projected once with P_kh) or an already
/// discrete field used as is.
struct ControlProblem {
  double alpha = 0.0;
  ControlBounds bounds;
  SpaceTimeFunction f;
  SpaceFunction y0;
  std::variant<SpaceTimeFunction, SpaceTimeField> target;
};

/// Coefficient-wise clamp.
BoundaryField project_box(const BoundaryField& v, const ControlBounds& bounds);

/// L2(Gamma) projection of each slab onto the P1 boundary functions whose
/// coefficients lie in the box (projected Gauss-Seidel on the boundary mass
/// matrix). Differs from project_box once a coefficient is clamped.
BoundaryField project_admissible(const FemOperators& ops, const BoundaryField& v,
                                 const ControlBounds& bounds);

/// The reduced functional u -> J(y(u), u) on a fixed discretization, with
/// the source, initial value and target discretized once.
class ReducedProblem {
 public:
  /// Throws Error(kInvalidArgument) for alpha <= 0 or an invalid box.
  ReducedProblem(const Discretization& d, ControlProblem problem);

  const Discretization& discretization() const { return d_; }
  double alpha() const { return alpha_; }
  const ControlBounds& bounds() const { return bounds_; }
  const SpaceTimeField& target() const { return target_; }

  SpaceTimeField state(const BoundaryField& u) const;
  double cost(const BoundaryField& u, const SpaceTimeField& y) const;

  struct Evaluation {
    double cost;
    SpaceTimeField y;
  };
  Evaluation evaluate_cost(const BoundaryField& u) const;

  /// Adjoint for the misfit y - target.
  SpaceTimeField adjoint(const SpaceTimeField& y) const;
  /// Discrete normal derivative of that adjoint.
  BoundaryField adjoint_derivative(const SpaceTimeField& y, const SpaceTimeField& z) const;

  /// alpha u - dz(y(u) - target): the L2(Sigma) Riesz representative of J'(u).
  BoundaryField reduced_gradient(const BoundaryField& u) const;
  /// Action of the reduced Hessian: alpha v - dz(lifted_solve(v)).
  BoundaryField hessian_apply(const BoundaryField& v) const;

  /// alpha plus a power-iteration estimate of the largest eigenvalue of the
  /// misfit part of the Hessian in the L2(Sigma) inner product.
  double curvature_bound(int power_iters) const;

  double sigma_norm(const BoundaryField& v) const;
  double sigma_inner(const BoundaryField& v, const BoundaryField& w) const;

 private:
  const Discretization& d_;
  double alpha_;
  ControlBounds bounds_;
  StateInputs base_;
  SpaceTimeField target_;
};

/// ||u - Pi(dz / alpha)||_Sigma with Pi = project_admissible.
double fixed_point_residual(const ReducedProblem& rp, const BoundaryField& u,
                            const BoundaryField& dz);

struct SolveOptions {
  double tol = 0.0;  ///< 0 selects 1e-8 * max(1, ||dz(0)||_Sigma)
  int max_iters = 2000;
  int power_iters = 20;
  double curvature_slack = 1.05;
};

struct OptimalityResult {
  BoundaryField u;
  SpaceTimeField y;
  SpaceTimeField z;
  BoundaryField normal_derivative;
  double cost = 0.0;
  double residual = 0.0;
  double tol = 0.0;
  double step = 0.0;
  int iterations = 0;
  std::vector<double> cost_history;
};

/// Thrown when the residual does not reach the tolerance; carries the
/// iterate with the smallest residual.
class ControlNotConverged : public Error {
 public:
  explicit ControlNotConverged(OptimalityResult best);
  const OptimalityResult& best() const { return best_; }

 private:
  OptimalityResult best_;
};

/// Accelerated projected iteration u <- Pi(w - (alpha w - dz(w)) / L) from
/// u = 0 with Pi = project_admissible, restarting the momentum whenever the
/// extrapolated step would increase the cost. Stops when
/// fixed_point_residual <= tol.
OptimalityResult solve_control(const ReducedProblem& rp, const SolveOptions& options = {});

}  // namespace pdbc
