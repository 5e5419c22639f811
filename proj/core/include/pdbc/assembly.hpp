#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "pdbc/fields.hpp"
#include "pdbc/mesh.hpp"
#include "pdbc/sparse.hpp"
#include "pdbc/timegrid.hpp"

namespace pdbc {

/// Assembled P1 forms on a mesh.
///
/// Full matrices are indexed by node. Block matrices use the interior and
/// boundary index sets of the mesh: the "i" index runs over
/// Mesh::interior_nodes(), the "b" index over Mesh::boundary_nodes() (boundary
/// traversal order). The boundary mass matrix uses the "b" index as well.
struct FemOperators {
  SparseSym mass;
  SparseSym stiffness;
  SparseSym boundary_mass;

  SparseSym mass_ii;
  SparseSym stiffness_ii;
  CsrMatrix mass_ib;
  CsrMatrix stiffness_ib;
  CsrMatrix mass_bi;
  CsrMatrix stiffness_bi;

  std::vector<int> interior;
  std::vector<int> boundary;

  int num_nodes() const { return mass.dim(); }
  int num_interior() const { return static_cast<int>(interior.size()); }
  int num_boundary() const { return static_cast<int>(boundary.size()); }

  /// Boundary values of a nodal field (the trace map).
  Eigen::VectorXd trace(const Eigen::VectorXd& nodal) const;
  Eigen::VectorXd interior_part(const Eigen::VectorXd& nodal) const;
  Eigen::VectorXd combine(const Eigen::VectorXd& interior_values,
                          const Eigen::VectorXd& boundary_values) const;
};

/// Exact P1 element integrals. Throws Error(kDegenerateMesh) for
/// zero-area triangles.
FemOperators assemble(const Mesh& mesh);

/// Load vector b_i = \int_Omega w phi_i with a six-point degree-4 rule, so
/// the integral is exact for quadratic and cubic w.
Eigen::VectorXd load_vector(const Mesh& mesh, const SpaceFunction& w);

/// Boundary load b_j = \int_Gamma w phi_j with two-point Gauss per edge,
/// indexed by boundary position.
Eigen::VectorXd boundary_load_vector(const Mesh& mesh, const SpaceFunction& w);

/// Solver tolerance used for all mass/stiffness solves in projections.
inline constexpr double kProjectionTol = 1e-12;

/// L2(Omega) projection onto V_h.
Eigen::VectorXd project_Ph(const FemOperators& ops, const Mesh& mesh, const SpaceFunction& w);
/// L2(Gamma) projection onto V_h(Gamma), indexed by boundary position.
Eigen::VectorXd project_Ph_boundary(const FemOperators& ops, const Mesh& mesh, const SpaceFunction& w);

/// Ritz projection onto V_h^0 of a function vanishing on Gamma, given by its
/// gradient. Returns a nodal field with zero boundary values.
Eigen::VectorXd ritz_projection(const FemOperators& ops, const Mesh& mesh,
                                const std::function<Eigen::Vector2d(const Point&)>& grad_v);
/// Ritz projection of a P1 nodal field.
Eigen::VectorXd ritz_projection(const FemOperators& ops, const Eigen::VectorXd& nodal);

/// Interior coefficients of P_h w, boundary coefficients of the boundary L2
/// projection of the trace of w.
Eigen::VectorXd modified_projection_Hhat(const FemOperators& ops, const Mesh& mesh,
                                         const SpaceFunction& w);
Eigen::VectorXd modified_projection_Hhat(const FemOperators& ops, const Eigen::VectorXd& nodal);

/// Space-time L2 projection onto X_kh: two-point Gauss slab average of the
/// load, then a mass solve per slab. The initial value of the result is
/// left empty.
SpaceTimeField project_Pkh(const FemOperators& ops, const Mesh& mesh, const TimeGrid& grid,
                           const SpaceTimeFunction& w);
BoundaryField project_Pkh_boundary(const FemOperators& ops, const Mesh& mesh, const TimeGrid& grid,
                                   const SpaceTimeFunction& w);

/// (v, w)_{L2(I; L2(Omega))} = sum_m k_m v_m^T M w_m.
double inner_omega(const FemOperators& ops, const TimeGrid& grid, const SpaceTimeField& v,
                   const SpaceTimeField& w);
/// (v, w)_{L2(I; L2(Gamma))} = sum_m k_m v_m^T M_Gamma w_m.
double inner_sigma(const FemOperators& ops, const TimeGrid& grid, const BoundaryField& v,
                   const BoundaryField& w);
double l2_norm(const FemOperators& ops, const TimeGrid& grid, const SpaceTimeField& v);
double l2_norm(const FemOperators& ops, const TimeGrid& grid, const BoundaryField& v);

}  // namespace pdbc
