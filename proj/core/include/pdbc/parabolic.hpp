#pragma once

#include <variant>
#include <vector>

#include <Eigen/Core>

#include "pdbc/assembly.hpp"
#include "pdbc/fields.hpp"
#include "pdbc/mesh.hpp"
#include "pdbc/sparse.hpp"
#include "pdbc/timegrid.hpp"

namespace pdbc {

/// Inner CG tolerance for the time-stepping solves.
inline constexpr double kStepSolveTol = 1e-11;

/// Mesh, time grid and everything assembled from them. Immutable once
/// constructed, so one instance can be shared by concurrent solves.
class Discretization {
 public:
  Discretization(Mesh mesh, TimeGrid grid, double step_tol = kStepSolveTol);

  const Mesh& mesh() const { return mesh_; }
  const TimeGrid& grid() const { return grid_; }
  const FemOperators& ops() const { return ops_; }

  int num_slabs() const { return grid_.num_slabs(); }
  int num_nodes() const { return mesh_.num_nodes(); }
  int num_interior() const { return mesh_.num_interior_nodes(); }
  int num_boundary() const { return mesh_.num_boundary_nodes(); }

  /// Interior block of M / k_m + K for slab m.
  const SparseSym& step_matrix(int m) const { return step_matrices_[step_index_[m]]; }
  const CgOptions& step_options() const { return step_options_; }

  SpaceTimeField zero_field() const { return SpaceTimeField::zeros(num_slabs(), num_nodes()); }
  BoundaryField zero_boundary_field() const {
    return BoundaryField::zeros(num_slabs(), num_boundary());
  }

 private:
  Mesh mesh_;
  TimeGrid grid_;
  FemOperators ops_;
  std::vector<SparseSym> step_matrices_;
  std::vector<int> step_index_;
  CgOptions step_options_;
};

/// Data of the state equation: source f, initial value y0, Dirichlet data
/// given either as a function on the boundary or as discrete coefficients
/// (used verbatim, without projection).
struct ProblemData {
  SpaceTimeFunction f;
  SpaceFunction y0;
  std::variant<SpaceTimeFunction, BoundaryField> u;
};

/// Discrete inputs of one forward solve.
struct StateInputs {
  std::vector<Eigen::VectorXd> load;  ///< slab-averaged load vectors (all nodes)
  Eigen::VectorXd initial;            ///< nodal initial value (all nodes)
  BoundaryField boundary;             ///< boundary coefficients per slab
};

/// Slab-averaged load vectors of f (two-point Gauss in time).
std::vector<Eigen::VectorXd> slab_loads(const Discretization& d, const SpaceTimeFunction& f);

/// Loads of f, P_h y0, and the boundary coefficients (P~_kh u for a
/// function, verbatim for a BoundaryField).
StateInputs discretize(const Discretization& d, const ProblemData& data);

/// Primal form: sum_m k_m v_m^T K w_m + sum_{m>=1} (v_m - v_{m-1})^T M w_m
/// + v_0^T M w_0 over 0-based slabs.
double bilinear_B(const Discretization& d, const SpaceTimeField& v, const SpaceTimeField& w);

/// The same form written after summation by parts in time:
/// sum_m k_m v_m^T K w_m - sum_{m<M-1} v_m^T M (w_{m+1} - w_m) + v_{M-1}^T M w_{M-1}.
double bilinear_B_dual(const Discretization& d, const SpaceTimeField& v, const SpaceTimeField& w);

/// DG(0)-CG(1) forward solve. The boundary coefficients are prescribed and
/// the interior coefficients follow from
///   (M_ii/k_m + K_ii) y_m = (M y_{m-1})_i / k_m + fbar_m,i - (M_ib/k_m + K_ib) u_m,
/// where y_{-1} is the (full) initial value.
SpaceTimeField solve_state(const Discretization& d, const StateInputs& inputs);
SpaceTimeField solve_state(const Discretization& d, const ProblemData& data);

/// Forward solve with f = 0, y0 = 0 and the given boundary coefficients.
SpaceTimeField lifted_solve(const Discretization& d, const BoundaryField& u);

/// Backward solve of B(phi, z) = (g, phi)_I for all phi in X^0_kh, where g is
/// piecewise constant and P1. The result vanishes on the boundary:
///   (M_ii/k_m + K_ii) z_m = M_ii z_{m+1} / k_m + (M g_m)_i,  z_M = 0.
SpaceTimeField solve_adjoint(const Discretization& d, const SpaceTimeField& g);

/// Variational discrete normal derivative of the adjoint z for data g: per
/// slab, M_Gamma dz_m = K_bi z_m + M_bi (z_m - z_{m+1}) / k_m - (M g_m)_b.
/// This is the discrete Green identity tested against every boundary basis
/// function.
BoundaryField normal_derivative(const Discretization& d, const SpaceTimeField& z,
                                const SpaceTimeField& g);

}  // namespace pdbc
