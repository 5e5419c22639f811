#include "pdbc/parabolic.hpp"

#include <cmath>

#include <fmt/format.h>

#include "pdbc/error.hpp"
#include "quadrature.hpp"

namespace pdbc {
namespace {

void check_field(const Discretization& d, const SpaceTimeField& v, const char* what) {
  bool ok = v.num_slabs() == d.num_slabs();
  for (int m = 0; ok && m < v.num_slabs(); ++m) ok = v.slabs[m].size() == d.num_nodes();
  if (!ok) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{}: field does not match {} slabs x {} nodes", what, d.num_slabs(),
                            d.num_nodes()));
  }
}

void check_field(const Discretization& d, const BoundaryField& v, const char* what) {
  bool ok = v.num_slabs() == d.num_slabs();
  for (int m = 0; ok && m < v.num_slabs(); ++m) ok = v.slabs[m].size() == d.num_boundary();
  if (!ok) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{}: boundary field does not match {} slabs x {} boundary nodes", what,
                            d.num_slabs(), d.num_boundary()));
  }
}

Eigen::VectorXd step_solve(const Discretization& d, int m, const Eigen::VectorXd& rhs,
                           const Eigen::VectorXd& guess) {
  return spd_solve(d.step_matrix(m), rhs, d.step_options(), guess).x;
}

}  // namespace

Discretization::Discretization(Mesh mesh, TimeGrid grid, double step_tol)
    : mesh_(std::move(mesh)), grid_(std::move(grid)), ops_(assemble(mesh_)) {
  step_options_.tol = step_tol;
  std::vector<double> distinct;
  step_index_.reserve(grid_.num_slabs());
  for (int m = 0; m < grid_.num_slabs(); ++m) {
    const double k = grid_.step(m);
    int found = -1;
    for (std::size_t j = 0; j < distinct.size(); ++j) {
      if (std::abs(distinct[j] - k) <= 1e-13 * k) {
        found = static_cast<int>(j);
        break;
      }
    }
    if (found < 0) {
      found = static_cast<int>(distinct.size());
      distinct.push_back(k);
      step_matrices_.push_back(linear_combination(1.0 / k, ops_.mass_ii, 1.0, ops_.stiffness_ii));
    }
    step_index_.push_back(found);
  }
}

std::vector<Eigen::VectorXd> slab_loads(const Discretization& d, const SpaceTimeFunction& f) {
  const TimeGrid& grid = d.grid();
  std::vector<Eigen::VectorXd> loads;
  loads.reserve(grid.num_slabs());
  for (int m = 0; m < grid.num_slabs(); ++m) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d.num_nodes());
    if (f) {
      for (const auto& q : quadrature::kGauss2) {
        const double t = grid.start(m) + q.x * grid.step(m);
        b += q.weight * load_vector(d.mesh(), [&](const Point& x) { return f(t, x); });
      }
    }
    loads.push_back(std::move(b));
  }
  return loads;
}

StateInputs discretize(const Discretization& d, const ProblemData& data) {
  StateInputs in;
  in.load = slab_loads(d, data.f);
  in.initial = data.y0 ? project_Ph(d.ops(), d.mesh(), data.y0) : Eigen::VectorXd::Zero(d.num_nodes());
  if (const auto* field = std::get_if<BoundaryField>(&data.u)) {
    check_field(d, *field, "discretize");
    in.boundary = *field;
  } else {
    const auto& fn = std::get<SpaceTimeFunction>(data.u);
    in.boundary = fn ? project_Pkh_boundary(d.ops(), d.mesh(), d.grid(), fn) : d.zero_boundary_field();
  }
  return in;
}

double bilinear_B(const Discretization& d, const SpaceTimeField& v, const SpaceTimeField& w) {
  check_field(d, v, "bilinear_B");
  check_field(d, w, "bilinear_B");
  const auto& ops = d.ops();
  double sum = 0.0;
  for (int m = 0; m < d.num_slabs(); ++m) {
    sum += d.grid().step(m) * v.slabs[m].dot(ops.stiffness * w.slabs[m]);
    const Eigen::VectorXd jump = m == 0 ? v.slabs[0] : Eigen::VectorXd(v.slabs[m] - v.slabs[m - 1]);
    sum += jump.dot(ops.mass * w.slabs[m]);
  }
  return sum;
}

double bilinear_B_dual(const Discretization& d, const SpaceTimeField& v, const SpaceTimeField& w) {
  check_field(d, v, "bilinear_B_dual");
  check_field(d, w, "bilinear_B_dual");
  const auto& ops = d.ops();
  const int last = d.num_slabs() - 1;
  double sum = 0.0;
  for (int m = 0; m <= last; ++m) {
    sum += d.grid().step(m) * v.slabs[m].dot(ops.stiffness * w.slabs[m]);
    const Eigen::VectorXd jump = m == last ? Eigen::VectorXd(-w.slabs[m])
                                           : Eigen::VectorXd(w.slabs[m + 1] - w.slabs[m]);
    sum -= v.slabs[m].dot(ops.mass * jump);
  }
  return sum;
}

SpaceTimeField solve_state(const Discretization& d, const StateInputs& inputs) {
  const auto& ops = d.ops();
  if (static_cast<int>(inputs.load.size()) != d.num_slabs() || inputs.initial.size() != d.num_nodes()) {
    throw Error(ErrorCode::kDimensionMismatch, "solve_state: inputs do not match discretization");
  }
  check_field(d, inputs.boundary, "solve_state");

  SpaceTimeField y;
  y.initial = inputs.initial;
  y.slabs.reserve(d.num_slabs());
  Eigen::VectorXd prev_i = ops.interior_part(inputs.initial);
  Eigen::VectorXd prev_b = ops.trace(inputs.initial);
  for (int m = 0; m < d.num_slabs(); ++m) {
    const double k = d.grid().step(m);
    const Eigen::VectorXd& u = inputs.boundary.slabs[m];
    Eigen::VectorXd rhs = ops.interior_part(inputs.load[m]);
    ops.mass_ii.matrix().multiply_add(prev_i, rhs, 1.0 / k);
    ops.mass_ib.multiply_add(prev_b, rhs, 1.0 / k);
    ops.mass_ib.multiply_add(u, rhs, -1.0 / k);
    ops.stiffness_ib.multiply_add(u, rhs, -1.0);
    prev_i = step_solve(d, m, rhs, prev_i);
    prev_b = u;
    y.slabs.push_back(ops.combine(prev_i, prev_b));
  }
  return y;
}

SpaceTimeField solve_state(const Discretization& d, const ProblemData& data) {
  return solve_state(d, discretize(d, data));
}

SpaceTimeField lifted_solve(const Discretization& d, const BoundaryField& u) {
  StateInputs in{std::vector<Eigen::VectorXd>(d.num_slabs(), Eigen::VectorXd::Zero(d.num_nodes())),
                 Eigen::VectorXd::Zero(d.num_nodes()), u};
  return solve_state(d, in);
}

SpaceTimeField solve_adjoint(const Discretization& d, const SpaceTimeField& g) {
  check_field(d, g, "solve_adjoint");
  const auto& ops = d.ops();
  SpaceTimeField z = d.zero_field();
  Eigen::VectorXd next_i = Eigen::VectorXd::Zero(d.num_interior());
  const Eigen::VectorXd zero_b = Eigen::VectorXd::Zero(d.num_boundary());
  for (int m = d.num_slabs() - 1; m >= 0; --m) {
    const double k = d.grid().step(m);
    Eigen::VectorXd rhs = ops.interior_part(ops.mass * g.slabs[m]);
    ops.mass_ii.matrix().multiply_add(next_i, rhs, 1.0 / k);
    next_i = step_solve(d, m, rhs, next_i);
    z.slabs[m] = ops.combine(next_i, zero_b);
  }
  return z;
}

BoundaryField normal_derivative(const Discretization& d, const SpaceTimeField& z,
                                const SpaceTimeField& g) {
  check_field(d, z, "normal_derivative");
  check_field(d, g, "normal_derivative");
  const auto& ops = d.ops();
  BoundaryField out;
  out.slabs.reserve(d.num_slabs());
  const CgOptions options{.tol = kProjectionTol};
  for (int m = 0; m < d.num_slabs(); ++m) {
    const double k = d.grid().step(m);
    const Eigen::VectorXd z_i = ops.interior_part(z.slabs[m]);
    Eigen::VectorXd jump_i = z_i;
    if (m + 1 < d.num_slabs()) jump_i -= ops.interior_part(z.slabs[m + 1]);
    Eigen::VectorXd r = -ops.trace(ops.mass * g.slabs[m]);
    ops.stiffness_bi.multiply_add(z_i, r);
    ops.mass_bi.multiply_add(jump_i, r, 1.0 / k);
    out.slabs.push_back(spd_solve(ops.boundary_mass, r, options).x);
  }
  return out;
}

}  // namespace pdbc
