#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pdbc/control.hpp"
#include "pdbc/error.hpp"
#include "pdbc/manufactured.hpp"

namespace pdbc {
namespace {

using std::numbers::pi;

BoundaryField random_boundary(const Discretization& d, std::mt19937_64& rng, double scale = 1.0) {
  BoundaryField u;
  for (int m = 0; m < d.num_slabs(); ++m) u.slabs.push_back(oracle::random_vector(rng, d.num_boundary(), scale));
  return u;
}

Eigen::VectorXd stack(const BoundaryField& u) {
  const int nb = static_cast<int>(u.slabs[0].size());
  Eigen::VectorXd out(u.num_slabs() * nb);
  for (int m = 0; m < u.num_slabs(); ++m) out.segment(m * nb, nb) = u.slabs[m];
  return out;
}

ControlProblem tracking_problem(double alpha, ControlBounds bounds = {}) {
  ControlProblem p;
  p.alpha = alpha;
  p.bounds = bounds;
  p.f = [](double t, const Point& x) { return t * x.x(); };
  p.y0 = [](const Point& x) { return x.y() * (1.0 - x.y()); };
  p.target = SpaceTimeFunction([](double t, const Point& x) { return std::sin(pi * t) * std::cos(pi * x.x()) + x.y(); });
  return p;
}

TEST(ProjectBox, ClampsCoefficientwise) {
  BoundaryField v{{Eigen::Vector3d(-2.0, 0.1, 3.0), Eigen::Vector3d(0.5, -0.5, 0.0)}};
  const BoundaryField p = project_box(v, {-0.5, 1.0});
  EXPECT_EQ(p.slabs[0], Eigen::Vector3d(-0.5, 0.1, 1.0));
  EXPECT_EQ(p.slabs[1], Eigen::Vector3d(0.5, -0.5, 0.0));
  const BoundaryField open = project_box(v, {});
  EXPECT_EQ(open.slabs[0], v.slabs[0]);
  const BoundaryField upper_only = project_box(v, {-kInf, 0.0});
  EXPECT_EQ(upper_only.slabs[0], Eigen::Vector3d(-2.0, 0.0, 0.0));
}

TEST(ProjectAdmissible, IsTheBoundaryMassProjection) {
  const Discretization d(unit_square_mesh(3), uniform_grid(2, 1.0));
  const ControlBounds box{-0.3, 0.5};
  const oracle::DenseForms dense = oracle::dense_forms(d.mesh());
  std::mt19937_64 rng(7);
  const BoundaryField v = random_boundary(d, rng);
  const BoundaryField p = project_admissible(d.ops(), v, box);
  for (int m = 0; m < 2; ++m) {
    const Eigen::MatrixXd& Mg = dense.boundary_mass;
    const Eigen::VectorXd expected = oracle::box_qp(Mg, -Mg * v.slabs[m], box.lower, box.upper);
    EXPECT_LE((p.slabs[m] - expected).cwiseAbs().maxCoeff(), 1e-12);
    // variational inequality (v - Pv, w - Pv)_Gamma <= 0 for admissible w
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd w = oracle::random_vector(rng, d.num_boundary()).cwiseMax(box.lower).cwiseMin(box.upper);
      EXPECT_LE((v.slabs[m] - p.slabs[m]).dot(Mg * (w - p.slabs[m])), 1e-12);
    }
  }
  EXPECT_GT((p - project_box(v, box)).max_abs(), 1e-3);
  EXPECT_LE((project_admissible(d.ops(), p, box) - p).max_abs(), 1e-15);
  EXPECT_EQ(project_admissible(d.ops(), v, {}).slabs, v.slabs);
  BoundaryField inside = project_box(v, {-0.1, 0.1});
  EXPECT_EQ(project_admissible(d.ops(), inside, box).slabs, inside.slabs);
}

TEST(ControlBounds, Validate) {
  EXPECT_NO_THROW((ControlBounds{-1.0, 1.0}.validate()));
  EXPECT_THROW((ControlBounds{1.0, 1.0}.validate()), Error);
  EXPECT_THROW((ControlBounds{2.0, -1.0}.validate()), Error);
  EXPECT_THROW((ControlBounds{std::nan(""), 1.0}.validate()), Error);
}

TEST(ReducedProblem, RejectsInvalidAlphaAndBounds) {
  const Discretization d(unit_square_mesh(2), uniform_grid(2, 1.0));
  for (double alpha : {0.0, -1.0}) {
    try {
      ReducedProblem(d, tracking_problem(alpha));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    }
  }
  EXPECT_THROW(ReducedProblem(d, tracking_problem(1.0, {1.0, 0.0})), Error);
}

TEST(ReducedProblem, CostOfZeroControlWithZeroTargetIsStateNorm) {
  const Discretization d(unit_square_mesh(3), uniform_grid(3, 1.0));
  ControlProblem p = tracking_problem(0.5);
  p.target = SpaceTimeFunction{};
  const ReducedProblem rp(d, p);
  const auto eval = rp.evaluate_cost(d.zero_boundary_field());
  const double norm = l2_norm(d.ops(), d.grid(), eval.y);
  EXPECT_NEAR(eval.cost, 0.5 * norm * norm, 1e-14 * norm * norm);
}

TEST(ReducedProblem, CostAgainstDenseOracle) {
  const Discretization d(unit_square_mesh(2), uniform_grid(1, 0.5));
  const ReducedProblem rp(d, tracking_problem(0.3));
  std::mt19937_64 rng(1);
  const BoundaryField u = random_boundary(d, rng);
  const oracle::DenseSpaceTime dense(d.mesh(), d.grid());
  const StateInputs in = discretize(d, ProblemData{tracking_problem(0.3).f, tracking_problem(0.3).y0, u});
  const Eigen::VectorXd y = dense.state(in.load, in.initial, stack(u));
  const Eigen::VectorXd e = y - dense.stack(rp.target().slabs);
  const double expected = 0.5 * dense.inner(e, e) + 0.15 * dense.inner_sigma(stack(u), stack(u));
  EXPECT_NEAR(rp.evaluate_cost(u).cost, expected, 1e-10 * expected);
}

TEST(ReducedProblem, RegularizationTermLinearInAlpha) {
  const Discretization d(unit_square_mesh(3), uniform_grid(2, 1.0));
  std::mt19937_64 rng(2);
  const BoundaryField u = random_boundary(d, rng);
  const ReducedProblem a(d, tracking_problem(1.0));
  const ReducedProblem b(d, tracking_problem(3.0));
  const double ja = a.evaluate_cost(u).cost;
  const double jb = b.evaluate_cost(u).cost;
  const double norm = a.sigma_norm(u);
  EXPECT_NEAR(jb - ja, 2.0 * 0.5 * norm * norm, 1e-12 * jb);
}

TEST(ReducedProblem, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(3);
  for (int n : {2, 4}) {
    const Discretization d(unit_square_mesh(n), uniform_grid(n, 1.0));
    const ReducedProblem rp(d, tracking_problem(0.2));
    const BoundaryField u = random_boundary(d, rng, 0.3);
    const BoundaryField grad = rp.reduced_gradient(u);
    for (int trial = 0; trial < 5; ++trial) {
      BoundaryField v = random_boundary(d, rng);
      v *= 1.0 / rp.sigma_norm(v);
      const double eps = 1e-5;
      const double fd = (rp.evaluate_cost(u + eps * v).cost - rp.evaluate_cost(u - eps * v).cost) / (2 * eps);
      const double exact = rp.sigma_inner(grad, v);
      EXPECT_LE(std::abs(fd - exact), 1e-6 * std::max(1.0, std::abs(exact))) << n;
    }
  }
}

TEST(ReducedProblem, HessianRayleighQuotientAtLeastAlpha) {
  const Discretization d(unit_square_mesh(4), uniform_grid(3, 1.0));
  const double alpha = 0.05;
  const ReducedProblem rp(d, tracking_problem(alpha));
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const BoundaryField v = random_boundary(d, rng);
    const double q = rp.sigma_inner(v, rp.hessian_apply(v)) / rp.sigma_inner(v, v);
    EXPECT_GE(q, alpha * (1.0 - 1e-10));
    EXPECT_LE(q, rp.curvature_bound(50) * (1.0 + 1e-8));
  }
}

TEST(ReducedProblem, HessianIsGradientDifference) {
  const Discretization d(unit_square_mesh(3), uniform_grid(2, 1.0));
  const ReducedProblem rp(d, tracking_problem(0.1));
  std::mt19937_64 rng(5);
  const BoundaryField u = random_boundary(d, rng);
  const BoundaryField v = random_boundary(d, rng);
  const BoundaryField diff = rp.reduced_gradient(u + v) - rp.reduced_gradient(u);
  EXPECT_LE((diff - rp.hessian_apply(v)).max_abs(), 1e-9 * diff.max_abs());
}

TEST(SolveControl, ZeroControlIsOptimalWhenTargetIsUncontrolledState) {
  const Discretization d(unit_square_mesh(3), uniform_grid(3, 1.0));
  ControlProblem p = tracking_problem(0.1);
  const ReducedProblem probe(d, p);
  p.target = probe.state(d.zero_boundary_field());
  const ReducedProblem rp(d, p);
  const OptimalityResult r = solve_control(rp);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_LE(r.u.max_abs(), 1e-12);
}

TEST(SolveControl, UnconstrainedSatisfiesOptimalitySystem) {
  const Discretization d(unit_square_mesh(4), uniform_grid(4, 1.0));
  const ReducedProblem rp(d, tracking_problem(0.1));
  const OptimalityResult r = solve_control(rp);
  BoundaryField lhs = r.u;
  lhs *= rp.alpha();
  lhs -= r.normal_derivative;
  EXPECT_LE(rp.sigma_norm(lhs), rp.alpha() * r.tol);
  EXPECT_LE(rp.sigma_norm(rp.reduced_gradient(r.u)), 2.0 * rp.alpha() * r.tol);
}

TEST(SolveControl, UnconstrainedCostIsMonotone) {
  const Discretization d(unit_square_mesh(4), uniform_grid(4, 1.0));
  const ReducedProblem rp(d, tracking_problem(0.05));
  const OptimalityResult r = solve_control(rp);
  ASSERT_GT(r.cost_history.size(), 2u);
  for (std::size_t i = 1; i < r.cost_history.size(); ++i) {
    EXPECT_LE(r.cost_history[i], r.cost_history[i - 1] * (1.0 + 1e-12)) << i;
  }
}

TEST(SolveControl, BoxSolutionIsProjectedFixedPoint) {
  const ControlSetup setup = manufactured_control_problem("active-box");
  const Discretization d(unit_square_mesh(4), uniform_grid(8, setup.horizon));
  const ReducedProblem rp(d, setup.problem);
  const OptimalityResult r = solve_control(rp);
  EXPECT_LE(fixed_point_residual(rp, r.u, r.normal_derivative), r.tol);
  EXPECT_LE(r.u.max_abs(), 0.5);
  int active = 0;
  for (const auto& s : r.u.slabs) active += (s.array().abs() == 0.5).count();
  EXPECT_GT(active, 0);
  const double recomputed = fixed_point_residual(rp, r.u, rp.adjoint_derivative(rp.state(r.u), rp.adjoint(rp.state(r.u))));
  EXPECT_LE(recomputed, r.tol * (1.0 + 1e-6));
}

TEST(SolveControl, MatchesDenseBoxQp) {
  const ControlSetup setup = manufactured_control_problem("active-box");
  const Discretization d(unit_square_mesh(2), uniform_grid(2, setup.horizon));
  const ControlProblem& p = setup.problem;
  const ReducedProblem rp(d, p);
  const OptimalityResult r = solve_control(rp, {.tol = 1e-12});

  // J(u) = 1/2 u^T A u + b^T u + const with u the stacked coefficients
  const oracle::DenseSpaceTime dense(d.mesh(), d.grid());
  const Eigen::MatrixXd S = dense.lifting_matrix();
  const Eigen::MatrixXd G = dense.omega_gram();
  const StateInputs base = discretize(d, ProblemData{p.f, p.y0, d.zero_boundary_field()});
  const Eigen::VectorXd misfit0 =
      dense.state(base.load, base.initial, Eigen::VectorXd::Zero(2 * d.num_boundary())) - dense.stack(rp.target().slabs);
  const Eigen::MatrixXd A = p.alpha * dense.sigma_gram() + S.transpose() * G * S;
  const Eigen::VectorXd expected = oracle::box_qp(A, S.transpose() * G * misfit0, p.bounds.lower, p.bounds.upper);
  ASSERT_EQ(expected.size(), 2 * d.num_boundary());
  const auto active = (expected.array().abs() == p.bounds.upper).count();
  EXPECT_GT(active, 0);
  EXPECT_LT(active, expected.size());
  EXPECT_LE((stack(r.u) - expected).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SolveControl, BoxCostIsMonotone) {
  const ControlSetup setup = manufactured_control_problem("active-box");
  const Discretization d(unit_square_mesh(4), uniform_grid(8, setup.horizon));
  const OptimalityResult r = solve_control(ReducedProblem(d, setup.problem));
  for (std::size_t i = 1; i < r.cost_history.size(); ++i) {
    EXPECT_LE(r.cost_history[i], r.cost_history[i - 1] + 1e-12 * r.cost_history[0]) << i;
  }
}

TEST(SolveControl, ArgminDependsOnlyOnTargetMinusUncontrolledState) {
  const Discretization d(unit_square_mesh(4), uniform_grid(4, 1.0));
  const ControlProblem full = tracking_problem(0.1, {-0.3, 0.4});
  const ReducedProblem a(d, full);
  ControlProblem shifted;
  shifted.alpha = full.alpha;
  shifted.bounds = full.bounds;
  shifted.target = a.target() - a.state(d.zero_boundary_field());
  const ReducedProblem b(d, shifted);
  const SolveOptions opts{.tol = 1e-11};
  const OptimalityResult ra = solve_control(a, opts);
  const OptimalityResult rb = solve_control(b, opts);
  EXPECT_LE((ra.u - rb.u).max_abs(), 1e-8);
  EXPECT_NEAR(ra.cost, rb.cost, 1e-9 * ra.cost);
}

TEST(SolveControl, NotConvergedCarriesBestIterate) {
  const ControlSetup setup = manufactured_control_problem("active-box");
  const Discretization d(unit_square_mesh(4), uniform_grid(4, setup.horizon));
  const ReducedProblem rp(d, setup.problem);
  try {
    solve_control(rp, {.max_iters = 2});
    FAIL();
  } catch (const ControlNotConverged& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMaxIterations);
    EXPECT_TRUE(e.is_solver_failure());
    const OptimalityResult& best = e.best();
    EXPECT_GT(best.residual, best.tol);
    EXPECT_EQ(best.u.num_slabs(), 4);
    EXPECT_NEAR(fixed_point_residual(rp, best.u, best.normal_derivative), best.residual, 1e-14);
  }
  EXPECT_THROW(solve_control(rp, {.power_iters = 0}), Error);
}

}  // namespace
}  // namespace pdbc
