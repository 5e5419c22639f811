#include "pdbc/control.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace pdbc {
namespace {

constexpr int kProjectionSweeps = 10000;

Eigen::VectorXd flatten(const BoundaryField& v) {
  Eigen::Index size = 0;
  for (const auto& s : v.slabs) size += s.size();
  Eigen::VectorXd out(size);
  Eigen::Index offset = 0;
  for (const auto& s : v.slabs) {
    out.segment(offset, s.size()) = s;
    offset += s.size();
  }
  return out;
}

BoundaryField unflatten(const Eigen::VectorXd& x, int num_slabs, int num_boundary) {
  BoundaryField out;
  out.slabs.reserve(num_slabs);
  for (int m = 0; m < num_slabs; ++m) out.slabs.push_back(x.segment(m * num_boundary, num_boundary));
  return out;
}

// a + beta (a - b), for fields carried along by the affine control-to-state map
template <class Field>
Field extrapolate(const Field& a, const Field& b, double beta) {
  Field out = a;
  for (std::size_t m = 0; m < out.slabs.size(); ++m) out.slabs[m] += beta * (a.slabs[m] - b.slabs[m]);
  return out;
}

BoundaryField gradient_step(const ReducedProblem& rp, const BoundaryField& w, const BoundaryField& dz,
                            double step) {
  BoundaryField v = w;
  v *= 1.0 - step * rp.alpha();
  v.axpy(step, dz);
  return project_admissible(rp.discretization().ops(), v, rp.bounds());
}

// Projected Gauss-Seidel for min 1/2 (x - w)^T M (x - w) over the box.
Eigen::VectorXd project_slab(const CsrMatrix& mass, const Eigen::VectorXd& w, const ControlBounds& bounds) {
  Eigen::VectorXd x = w.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
  if (x == w) return x;
  const auto row_ptr = mass.row_ptr();
  const auto col = mass.col_idx();
  const auto val = mass.values();
  const double scale = 1.0 + w.cwiseAbs().maxCoeff();
  for (int sweep = 0; sweep < kProjectionSweeps; ++sweep) {
    double change = 0.0;
    for (int i = 0; i < x.size(); ++i) {
      double diag = 0.0;
      double off = 0.0;
      for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
        if (col[p] == i) {
          diag = val[p];
        } else {
          off += val[p] * (x[col[p]] - w[col[p]]);
        }
      }
      const double next = std::clamp(w[i] - off / diag, bounds.lower, bounds.upper);
      change = std::max(change, std::abs(next - x[i]));
      x[i] = next;
    }
    if (change <= 1e-15 * scale) return x;
  }
  throw Error(ErrorCode::kMaxIterations, "admissible projection did not converge");
}

}  // namespace

void ControlBounds::validate() const {
  if (std::isnan(lower) || std::isnan(upper) || !(lower < upper)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("control bounds need lower < upper, got ({}, {})", lower, upper));
  }
}

BoundaryField project_box(const BoundaryField& v, const ControlBounds& bounds) {
  BoundaryField out = v;
  for (auto& s : out.slabs) s = s.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
  return out;
}

BoundaryField project_admissible(const FemOperators& ops, const BoundaryField& v,
                                 const ControlBounds& bounds) {
  BoundaryField out = v;
  if (std::isinf(bounds.lower) && std::isinf(bounds.upper)) return out;
  for (auto& s : out.slabs) s = project_slab(ops.boundary_mass.matrix(), s, bounds);
  return out;
}

ReducedProblem::ReducedProblem(const Discretization& d, ControlProblem problem)
    : d_(d), alpha_(problem.alpha), bounds_(problem.bounds) {
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("alpha must be positive, got {}", alpha_));
  }
  bounds_.validate();
  base_ = discretize(d, ProblemData{problem.f, problem.y0, d.zero_boundary_field()});
  if (auto* field = std::get_if<SpaceTimeField>(&problem.target)) {
    if (field->num_slabs() != d.num_slabs()) {
      throw Error(ErrorCode::kDimensionMismatch, "target field does not match the time grid");
    }
    for (const auto& s : field->slabs) {
      if (s.size() != d.num_nodes()) {
        throw Error(ErrorCode::kDimensionMismatch, "target field does not match the mesh");
      }
    }
    target_ = std::move(*field);
  } else if (const auto& fn = std::get<SpaceTimeFunction>(problem.target)) {
    target_ = project_Pkh(d.ops(), d.mesh(), d.grid(), fn);
  } else {
    target_ = d.zero_field();
  }
}

SpaceTimeField ReducedProblem::state(const BoundaryField& u) const {
  StateInputs in{base_.load, base_.initial, u};
  return solve_state(d_, in);
}

double ReducedProblem::cost(const BoundaryField& u, const SpaceTimeField& y) const {
  double misfit = 0.0;
  for (int m = 0; m < d_.num_slabs(); ++m) {
    const Eigen::VectorXd r = y.slabs[m] - target_.slabs[m];
    misfit += d_.grid().step(m) * r.dot(d_.ops().mass * r);
  }
  return 0.5 * misfit + 0.5 * alpha_ * sigma_inner(u, u);
}

ReducedProblem::Evaluation ReducedProblem::evaluate_cost(const BoundaryField& u) const {
  SpaceTimeField y = state(u);
  const double c = cost(u, y);
  return {c, std::move(y)};
}

SpaceTimeField ReducedProblem::adjoint(const SpaceTimeField& y) const {
  SpaceTimeField g = y;
  for (int m = 0; m < d_.num_slabs(); ++m) g.slabs[m] -= target_.slabs[m];
  return solve_adjoint(d_, g);
}

BoundaryField ReducedProblem::adjoint_derivative(const SpaceTimeField& y,
                                                 const SpaceTimeField& z) const {
  SpaceTimeField g = y;
  for (int m = 0; m < d_.num_slabs(); ++m) g.slabs[m] -= target_.slabs[m];
  return normal_derivative(d_, z, g);
}

BoundaryField ReducedProblem::reduced_gradient(const BoundaryField& u) const {
  const SpaceTimeField y = state(u);
  const SpaceTimeField z = adjoint(y);
  BoundaryField g = u;
  g *= alpha_;
  return g -= adjoint_derivative(y, z);
}

BoundaryField ReducedProblem::hessian_apply(const BoundaryField& v) const {
  const SpaceTimeField y = lifted_solve(d_, v);
  const SpaceTimeField z = solve_adjoint(d_, y);
  BoundaryField out = v;
  out *= alpha_;
  return out -= normal_derivative(d_, z, y);
}

double ReducedProblem::curvature_bound(int power_iters) const {
  const int nb = d_.num_boundary();
  const int ns = d_.num_slabs();
  const LinearMap misfit_part = [&](const Eigen::VectorXd& x) {
    const BoundaryField v = unflatten(x, ns, nb);
    const SpaceTimeField y = lifted_solve(d_, v);
    BoundaryField out = normal_derivative(d_, solve_adjoint(d_, y), y);
    out *= -1.0;
    return flatten(out);
  };
  const InnerProduct inner = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return sigma_inner(unflatten(a, ns, nb), unflatten(b, ns, nb));
  };
  return alpha_ + estimate_opnorm(misfit_part, ns * nb, power_iters, inner);
}

double ReducedProblem::sigma_inner(const BoundaryField& v, const BoundaryField& w) const {
  return inner_sigma(d_.ops(), d_.grid(), v, w);
}

double ReducedProblem::sigma_norm(const BoundaryField& v) const {
  return std::sqrt(std::max(0.0, sigma_inner(v, v)));
}

double fixed_point_residual(const ReducedProblem& rp, const BoundaryField& u,
                            const BoundaryField& dz) {
  BoundaryField scaled = dz;
  scaled *= 1.0 / rp.alpha();
  return rp.sigma_norm(u - project_admissible(rp.discretization().ops(), scaled, rp.bounds()));
}

ControlNotConverged::ControlNotConverged(OptimalityResult best)
    : Error(ErrorCode::kMaxIterations,
            fmt::format("control solve stopped after {} iterations with residual {:.3e} > {:.3e}",
                        best.iterations, best.residual, best.tol)),
      best_(std::move(best)) {}

OptimalityResult solve_control(const ReducedProblem& rp, const SolveOptions& options) {
  if (options.max_iters < 0 || options.power_iters < 1 || !(options.curvature_slack >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "solve_control: invalid options");
  }
  const Discretization& d = rp.discretization();

  struct Iterate {
    BoundaryField u;
    SpaceTimeField y;
    SpaceTimeField z;
    BoundaryField dz;
    double cost;
  };
  auto make_iterate = [&](BoundaryField u) {
    Iterate it{std::move(u), {}, {}, {}, 0.0};
    it.y = rp.state(it.u);
    it.cost = rp.cost(it.u, it.y);
    it.z = rp.adjoint(it.y);
    it.dz = rp.adjoint_derivative(it.y, it.z);
    return it;
  };

  Iterate cur = make_iterate(d.zero_boundary_field());
  const double tol = options.tol > 0.0 ? options.tol : 1e-8 * std::max(1.0, rp.sigma_norm(cur.dz));
  const double step = 1.0 / (options.curvature_slack * rp.curvature_bound(options.power_iters));

  OptimalityResult result;
  result.tol = tol;
  result.step = step;
  result.cost_history.push_back(cur.cost);

  auto finish = [&](const Iterate& it, double residual, int iterations) {
    result.u = it.u;
    result.y = it.y;
    result.z = it.z;
    result.normal_derivative = it.dz;
    result.cost = it.cost;
    result.residual = residual;
    result.iterations = iterations;
  };

  Iterate prev = cur;
  double t = 1.0;
  double best_residual = kInf;
  for (int iter = 0;; ++iter) {
    const double residual = fixed_point_residual(rp, cur.u, cur.dz);
    if (residual < best_residual) {
      best_residual = residual;
      finish(cur, residual, iter);
    }
    if (residual <= tol) {
      finish(cur, residual, iter);
      return result;
    }
    if (iter == options.max_iters) {
      result.iterations = iter;
      throw ControlNotConverged(std::move(result));
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    Iterate next;
    bool have_next = false;
    if (beta > 0.0) {
      const BoundaryField w = extrapolate(cur.u, prev.u, beta);
      const BoundaryField dz_w = extrapolate(cur.dz, prev.dz, beta);
      BoundaryField u = gradient_step(rp, w, dz_w, step);
      SpaceTimeField y = rp.state(u);
      const double c = rp.cost(u, y);
      if (c <= cur.cost) {
        next = Iterate{std::move(u), std::move(y), {}, {}, c};
        next.z = rp.adjoint(next.y);
        next.dz = rp.adjoint_derivative(next.y, next.z);
        have_next = true;
        t = t_next;
      }
    }
    if (!have_next) {
      next = make_iterate(gradient_step(rp, cur.u, cur.dz, step));
      t = beta > 0.0 ? 1.0 : t_next;
    }
    prev = std::move(cur);
    cur = std::move(next);
    result.cost_history.push_back(cur.cost);
  }
}

}  // namespace pdbc
