// Dense reference computations for the test suites. Nothing here calls the
// library's assembly or time stepping; element integrals come from the
// quadrature rules below and all systems are solved by dense factorization.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pdbc/mesh.hpp"
#include "pdbc/timegrid.hpp"

namespace pdbc::oracle {

// Seven-point degree-5 rule (Strang-Fix), written out independently of the
// library tables.
inline std::vector<std::pair<std::array<double, 3>, double>> triangle_rule() {
  const double a1 = 0.0597158717897698, b1 = 0.4701420641051151;
  const double a2 = 0.7974269853530873, b2 = 0.1012865073234563;
  const double w0 = 0.225, w1 = 0.1323941527885062, w2 = 0.1259391805448271;
  return {{{1.0 / 3, 1.0 / 3, 1.0 / 3}, w0}, {{a1, b1, b1}, w1}, {{b1, a1, b1}, w1},
          {{b1, b1, a1}, w1},                {{a2, b2, b2}, w2}, {{b2, a2, b2}, w2},
          {{b2, b2, a2}, w2}};
}

struct DenseForms {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd boundary_mass;  // boundary-position indexed
};

// Mass by quadrature of products of barycentric coordinates, stiffness from
// the inverse Jacobian of the affine map, boundary mass by 3-point Gauss.
inline DenseForms dense_forms(const Mesh& mesh) {
  const int n = mesh.num_nodes();
  DenseForms f{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n),
               Eigen::MatrixXd::Zero(mesh.num_boundary_nodes(), mesh.num_boundary_nodes())};
  const auto rule = triangle_rule();
  for (const auto& tri : mesh.triangles()) {
    const Point p0 = mesh.node(tri[0]), p1 = mesh.node(tri[1]), p2 = mesh.node(tri[2]);
    Eigen::Matrix2d J;
    J.col(0) = p1 - p0;
    J.col(1) = p2 - p0;
    const double area = 0.5 * std::abs(J.determinant());
    // reference gradients of 1-s-t, s, t
    Eigen::Matrix<double, 2, 3> ref;
    ref << -1, 1, 0, -1, 0, 1;
    const Eigen::Matrix<double, 2, 3> grad = J.inverse().transpose() * ref;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double m = 0.0;
        for (const auto& [bary, w] : rule) m += w * bary[i] * bary[j];
        f.mass(tri[i], tri[j]) += area * m;
        f.stiffness(tri[i], tri[j]) += area * grad.col(i).dot(grad.col(j));
      }
    }
  }
  const double g = std::sqrt(0.6);
  const std::array<double, 3> x{0.5 * (1 - g), 0.5, 0.5 * (1 + g)};
  const std::array<double, 3> w{5.0 / 18, 8.0 / 18, 5.0 / 18};
  for (const auto& [a, b] : mesh.boundary_edges()) {
    const double len = (mesh.node(a) - mesh.node(b)).norm();
    const int pa = mesh.boundary_position(a), pb = mesh.boundary_position(b);
    for (int q = 0; q < 3; ++q) {
      const double phi_a = 1 - x[q], phi_b = x[q];
      f.boundary_mass(pa, pa) += len * w[q] * phi_a * phi_a;
      f.boundary_mass(pb, pb) += len * w[q] * phi_b * phi_b;
      f.boundary_mass(pa, pb) += len * w[q] * phi_a * phi_b;
      f.boundary_mass(pb, pa) += len * w[q] * phi_a * phi_b;
    }
  }
  return f;
}

// Space-time dof (m, i) lives at m * N + i.
struct DenseSpaceTime {
  const Mesh& mesh;
  const TimeGrid& grid;
  DenseForms forms;
  Eigen::MatrixXd B;  // B(v, w) = v^T B w

  DenseSpaceTime(const Mesh& mesh_, const TimeGrid& grid_)
      : mesh(mesh_), grid(grid_), forms(dense_forms(mesh_)) {
    const int N = mesh.num_nodes();
    const int M = grid.num_slabs();
    B = Eigen::MatrixXd::Zero(M * N, M * N);
    for (int m = 0; m < M; ++m) {
      B.block(m * N, m * N, N, N) = grid.step(m) * forms.stiffness + forms.mass;
      if (m > 0) B.block((m - 1) * N, m * N, N, N) = -forms.mass;
    }
  }

  int N() const { return mesh.num_nodes(); }
  int M() const { return grid.num_slabs(); }
  int Nb() const { return mesh.num_boundary_nodes(); }

  Eigen::VectorXd stack(const std::vector<Eigen::VectorXd>& slabs) const {
    Eigen::VectorXd out(M() * N());
    for (int m = 0; m < M(); ++m) out.segment(m * N(), N()) = slabs[m];
    return out;
  }
  std::vector<Eigen::VectorXd> unstack(const Eigen::VectorXd& v, int width) const {
    std::vector<Eigen::VectorXd> out;
    for (int m = 0; m < M(); ++m) out.push_back(v.segment(m * width, width));
    return out;
  }

  // (v, w)_I for stacked nodal fields
  double inner(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const {
    double s = 0.0;
    for (int m = 0; m < M(); ++m) {
      s += grid.step(m) * v.segment(m * N(), N()).dot(forms.mass * w.segment(m * N(), N()));
    }
    return s;
  }
  double inner_sigma(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const {
    double s = 0.0;
    for (int m = 0; m < M(); ++m) {
      s += grid.step(m) * v.segment(m * Nb(), Nb()).dot(forms.boundary_mass * w.segment(m * Nb(), Nb()));
    }
    return s;
  }

  // Solves B(y, phi) = sum_m k_m load_m(phi_m) + initial^T M phi_0 over
  // interior test functions, with boundary coefficients `boundary`
  // (stacked by boundary position).
  Eigen::VectorXd state(const std::vector<Eigen::VectorXd>& loads, const Eigen::VectorXd& initial,
                        const Eigen::VectorXd& boundary) const {
    const int total = M() * N();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(total, total);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(total);
    const Eigen::MatrixXd Bt = B.transpose();
    for (int m = 0; m < M(); ++m) {
      for (int i = 0; i < N(); ++i) {
        const int row = m * N() + i;
        const int p = mesh.boundary_position(i);
        if (p >= 0) {
          A(row, row) = 1.0;
          rhs(row) = boundary(m * Nb() + p);
        } else {
          A.row(row) = Bt.row(row);
          rhs(row) = grid.step(m) * loads[m](i);
          if (m == 0) rhs(row) += (forms.mass * initial)(i);
        }
      }
    }
    return A.fullPivLu().solve(rhs);
  }

  // Solves B(phi, z) = (g, phi)_I over interior test functions, z = 0 on
  // the boundary.
  Eigen::VectorXd adjoint(const Eigen::VectorXd& g) const {
    const int total = M() * N();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(total, total);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(total);
    for (int m = 0; m < M(); ++m) {
      for (int i = 0; i < N(); ++i) {
        const int row = m * N() + i;
        if (mesh.is_boundary(i)) {
          A(row, row) = 1.0;
        } else {
          A.row(row) = B.row(row);
          rhs(row) = grid.step(m) * (forms.mass * g.segment(m * N(), N()))(i);
        }
      }
    }
    return A.fullPivLu().solve(rhs);
  }

  Eigen::VectorXd lifted(const Eigen::VectorXd& boundary) const {
    return state(std::vector<Eigen::VectorXd>(M(), Eigen::VectorXd::Zero(N())),
                 Eigen::VectorXd::Zero(N()), boundary);
  }

  // Lifted solves of every boundary basis function, one column each.
  Eigen::MatrixXd lifting_matrix() const {
    Eigen::MatrixXd S(M() * N(), M() * Nb());
    for (int c = 0; c < M() * Nb(); ++c) S.col(c) = lifted(Eigen::VectorXd::Unit(M() * Nb(), c));
    return S;
  }

  // W with (u, v)_Sigma = u^T W v.
  Eigen::MatrixXd sigma_gram() const {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(M() * Nb(), M() * Nb());
    for (int m = 0; m < M(); ++m) W.block(m * Nb(), m * Nb(), Nb(), Nb()) = grid.step(m) * forms.boundary_mass;
    return W;
  }
  Eigen::MatrixXd omega_gram() const {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(M() * N(), M() * N());
    for (int m = 0; m < M(); ++m) G.block(m * N(), m * N(), N(), N()) = grid.step(m) * forms.mass;
    return G;
  }

  // Normal derivative through its defining duality: for every boundary
  // basis function phi, (dz, phi)_Sigma = -(g, lifted(phi))_I.
  Eigen::VectorXd normal_derivative_by_duality(const Eigen::VectorXd& g) const {
    const Eigen::MatrixXd S = lifting_matrix();
    const Eigen::VectorXd rhs = -S.transpose() * (omega_gram() * g);
    return sigma_gram().ldlt().solve(rhs);
  }
};

// Minimizer of 1/2 u^T A u + b^T u over lower <= u <= upper by projected
// gradient on the dense matrix; returns empty without convergence.
inline Eigen::VectorXd box_qp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double lower,
                              double upper, int max_iters = 1000000) {
  const double step = 1.0 / Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues().maxCoeff();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(b.size());
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd next = (u - step * (A * u + b)).cwiseMax(lower).cwiseMin(upper);
    const double change = (next - u).cwiseAbs().maxCoeff();
    u = next;
    if (change <= 1e-15 * std::max(1.0, u.cwiseAbs().maxCoeff())) return u;
  }
  return {};
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

}  // namespace pdbc::oracle
