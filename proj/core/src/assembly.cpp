#include "pdbc/assembly.hpp"

#include <cmath>

#include <fmt/format.h>

#include "pdbc/error.hpp"
#include "quadrature.hpp"

namespace pdbc {
namespace {

struct ElementGeometry {
  std::array<Point, 3> vertices;
  std::array<Eigen::Vector2d, 3> grad;  // gradients of the barycentric coordinates
  double area;
};

ElementGeometry element_geometry(const Mesh& mesh, int t) {
  ElementGeometry g;
  const auto& tri = mesh.triangles()[t];
  for (int i = 0; i < 3; ++i) g.vertices[i] = mesh.node(tri[i]);
  g.area = mesh.triangle_area(t);
  if (!(g.area > 0.0)) {
    throw Error(ErrorCode::kDegenerateMesh, fmt::format("triangle {} has zero area", t));
  }
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d e = g.vertices[(i + 2) % 3] - g.vertices[(i + 1) % 3];
    g.grad[i] = Eigen::Vector2d(-e.y(), e.x()) / (2.0 * g.area);
  }
  return g;
}

Point at(const ElementGeometry& g, const std::array<double, 3>& bary) {
  return bary[0] * g.vertices[0] + bary[1] * g.vertices[1] + bary[2] * g.vertices[2];
}

Eigen::VectorXd solve_checked(const SparseSym& A, const Eigen::VectorXd& b) {
  return spd_solve(A, b, CgOptions{.tol = kProjectionTol}).x;
}

}  // namespace

Eigen::VectorXd FemOperators::trace(const Eigen::VectorXd& nodal) const {
  Eigen::VectorXd out(num_boundary());
  for (int p = 0; p < num_boundary(); ++p) out[p] = nodal[boundary[p]];
  return out;
}

Eigen::VectorXd FemOperators::interior_part(const Eigen::VectorXd& nodal) const {
  Eigen::VectorXd out(num_interior());
  for (int p = 0; p < num_interior(); ++p) out[p] = nodal[interior[p]];
  return out;
}

Eigen::VectorXd FemOperators::combine(const Eigen::VectorXd& interior_values,
                                      const Eigen::VectorXd& boundary_values) const {
  Eigen::VectorXd out(num_nodes());
  for (int p = 0; p < num_interior(); ++p) out[interior[p]] = interior_values[p];
  for (int p = 0; p < num_boundary(); ++p) out[boundary[p]] = boundary_values[p];
  return out;
}

FemOperators assemble(const Mesh& mesh) {
  const int n = mesh.num_nodes();
  std::vector<Triplet> mass;
  std::vector<Triplet> stiffness;
  mass.reserve(9 * static_cast<std::size_t>(mesh.num_triangles()));
  stiffness.reserve(9 * static_cast<std::size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = element_geometry(mesh, t);
    const auto& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        mass.push_back({tri[i], tri[j], g.area / 12.0 * (i == j ? 2.0 : 1.0)});
        stiffness.push_back({tri[i], tri[j], g.area * g.grad[i].dot(g.grad[j])});
      }
    }
  }

  std::vector<Triplet> boundary_mass;
  for (const auto& [a, b] : mesh.boundary_edges()) {
    const double length = (mesh.node(a) - mesh.node(b)).norm();
    const int pa = mesh.boundary_position(a);
    const int pb = mesh.boundary_position(b);
    boundary_mass.push_back({pa, pa, length / 3.0});
    boundary_mass.push_back({pb, pb, length / 3.0});
    boundary_mass.push_back({pa, pb, length / 6.0});
    boundary_mass.push_back({pb, pa, length / 6.0});
  }

  FemOperators ops;
  ops.mass = SparseSym(CsrMatrix::from_triplets(n, n, std::move(mass)));
  ops.stiffness = SparseSym(CsrMatrix::from_triplets(n, n, std::move(stiffness)));
  const int nb = mesh.num_boundary_nodes();
  ops.boundary_mass = SparseSym(CsrMatrix::from_triplets(nb, nb, std::move(boundary_mass)));
  ops.interior = mesh.interior_nodes();
  ops.boundary = mesh.boundary_nodes();

  ops.mass_ii = SparseSym(ops.mass.matrix().submatrix(ops.interior, ops.interior));
  ops.stiffness_ii = SparseSym(ops.stiffness.matrix().submatrix(ops.interior, ops.interior));
  ops.mass_ib = ops.mass.matrix().submatrix(ops.interior, ops.boundary);
  ops.stiffness_ib = ops.stiffness.matrix().submatrix(ops.interior, ops.boundary);
  ops.mass_bi = ops.mass_ib.transpose();
  ops.stiffness_bi = ops.stiffness_ib.transpose();
  return ops;
}

Eigen::VectorXd load_vector(const Mesh& mesh, const SpaceFunction& w) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = element_geometry(mesh, t);
    const auto& tri = mesh.triangles()[t];
    for (const auto& q : quadrature::kTriangleDegree4) {
      const double value = q.weight * g.area * w(at(g, q.bary));
      for (int i = 0; i < 3; ++i) b[tri[i]] += value * q.bary[i];
    }
  }
  return b;
}

Eigen::VectorXd boundary_load_vector(const Mesh& mesh, const SpaceFunction& w) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_boundary_nodes());
  for (const auto& [a, c] : mesh.boundary_edges()) {
    const Point& pa = mesh.node(a);
    const Point& pc = mesh.node(c);
    const double length = (pc - pa).norm();
    for (const auto& q : quadrature::kGauss2) {
      const double value = q.weight * length * w((1.0 - q.x) * pa + q.x * pc);
      b[mesh.boundary_position(a)] += value * (1.0 - q.x);
      b[mesh.boundary_position(c)] += value * q.x;
    }
  }
  return b;
}

Eigen::VectorXd project_Ph(const FemOperators& ops, const Mesh& mesh, const SpaceFunction& w) {
  return solve_checked(ops.mass, load_vector(mesh, w));
}

Eigen::VectorXd project_Ph_boundary(const FemOperators& ops, const Mesh& mesh,
                                    const SpaceFunction& w) {
  return solve_checked(ops.boundary_mass, boundary_load_vector(mesh, w));
}

Eigen::VectorXd ritz_projection(const FemOperators& ops, const Mesh& mesh,
                                const std::function<Eigen::Vector2d(const Point&)>& grad_v) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = element_geometry(mesh, t);
    const auto& tri = mesh.triangles()[t];
    Eigen::Vector2d integral = Eigen::Vector2d::Zero();
    for (const auto& q : quadrature::kTriangleDegree4) integral += q.weight * grad_v(at(g, q.bary));
    integral *= g.area;
    for (int i = 0; i < 3; ++i) b[tri[i]] += g.grad[i].dot(integral);
  }
  const Eigen::VectorXd interior = solve_checked(ops.stiffness_ii, ops.interior_part(b));
  return ops.combine(interior, Eigen::VectorXd::Zero(ops.num_boundary()));
}

Eigen::VectorXd ritz_projection(const FemOperators& ops, const Eigen::VectorXd& nodal) {
  const Eigen::VectorXd b = ops.interior_part(ops.stiffness * nodal);
  return ops.combine(solve_checked(ops.stiffness_ii, b), Eigen::VectorXd::Zero(ops.num_boundary()));
}

Eigen::VectorXd modified_projection_Hhat(const FemOperators& ops, const Mesh& mesh,
                                         const SpaceFunction& w) {
  const Eigen::VectorXd full = project_Ph(ops, mesh, w);
  return ops.combine(ops.interior_part(full), project_Ph_boundary(ops, mesh, w));
}

Eigen::VectorXd modified_projection_Hhat(const FemOperators& ops, const Eigen::VectorXd& nodal) {
  const Eigen::VectorXd full = solve_checked(ops.mass, ops.mass * nodal);
  const Eigen::VectorXd trace = ops.trace(nodal);
  const Eigen::VectorXd boundary = solve_checked(ops.boundary_mass, ops.boundary_mass * trace);
  return ops.combine(ops.interior_part(full), boundary);
}

SpaceTimeField project_Pkh(const FemOperators& ops, const Mesh& mesh, const TimeGrid& grid,
                           const SpaceTimeFunction& w) {
  SpaceTimeField out;
  out.slabs.reserve(grid.num_slabs());
  for (int m = 0; m < grid.num_slabs(); ++m) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_nodes());
    for (const auto& q : quadrature::kGauss2) {
      const double t = grid.start(m) + q.x * grid.step(m);
      b += q.weight * load_vector(mesh, [&](const Point& x) { return w(t, x); });
    }
    out.slabs.push_back(solve_checked(ops.mass, b));
  }
  return out;
}

BoundaryField project_Pkh_boundary(const FemOperators& ops, const Mesh& mesh, const TimeGrid& grid,
                                   const SpaceTimeFunction& w) {
  BoundaryField out;
  out.slabs.reserve(grid.num_slabs());
  for (int m = 0; m < grid.num_slabs(); ++m) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_boundary_nodes());
    for (const auto& q : quadrature::kGauss2) {
      const double t = grid.start(m) + q.x * grid.step(m);
      b += q.weight * boundary_load_vector(mesh, [&](const Point& x) { return w(t, x); });
    }
    out.slabs.push_back(solve_checked(ops.boundary_mass, b));
  }
  return out;
}

double inner_omega(const FemOperators& ops, const TimeGrid& grid, const SpaceTimeField& v,
                   const SpaceTimeField& w) {
  if (v.num_slabs() != grid.num_slabs() || w.num_slabs() != grid.num_slabs()) {
    throw Error(ErrorCode::kDimensionMismatch, "inner_omega: slab count differs from grid");
  }
  double sum = 0.0;
  for (int m = 0; m < grid.num_slabs(); ++m) sum += grid.step(m) * v.slabs[m].dot(ops.mass * w.slabs[m]);
  return sum;
}

double inner_sigma(const FemOperators& ops, const TimeGrid& grid, const BoundaryField& v,
                   const BoundaryField& w) {
  if (v.num_slabs() != grid.num_slabs() || w.num_slabs() != grid.num_slabs()) {
    throw Error(ErrorCode::kDimensionMismatch, "inner_sigma: slab count differs from grid");
  }
  double sum = 0.0;
  for (int m = 0; m < grid.num_slabs(); ++m) {
    sum += grid.step(m) * v.slabs[m].dot(ops.boundary_mass * w.slabs[m]);
  }
  return sum;
}

double l2_norm(const FemOperators& ops, const TimeGrid& grid, const SpaceTimeField& v) {
  return std::sqrt(std::max(0.0, inner_omega(ops, grid, v, v)));
}

double l2_norm(const FemOperators& ops, const TimeGrid& grid, const BoundaryField& v) {
  return std::sqrt(std::max(0.0, inner_sigma(ops, grid, v, v)));
}

}  // namespace pdbc
