#include "pdbc/manufactured.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace pdbc {
namespace {

StateProblem from_exact(std::string id, SpaceTimeFunction exact, SpaceTimeFunction f) {
  StateProblem p;
  p.id = std::move(id);
  p.exact = exact;
  p.data.f = std::move(f);
  p.data.y0 = [exact](const Point& x) { return exact(0.0, x); };
  p.data.u = exact;
  return p;
}

StateProblem smooth_inhomogeneous() {
  auto y = [](double t, const Point& x) { return std::exp(-t) * x.squaredNorm(); };
  auto f = [](double t, const Point& x) { return -std::exp(-t) * (x.squaredNorm() + 4.0); };
  return from_exact("smooth-inhomogeneous", y, f);
}

StateProblem rough_boundary() {
  auto y = [](double t, const Point& x) {
    return t > 0.0 ? std::erfc(x.x() / (2.0 * std::sqrt(t))) : 0.0;
  };
  StateProblem p = from_exact("rough-boundary", y, [](double, const Point&) { return 0.0; });
  p.data.y0 = [](const Point&) { return 0.0; };
  return p;
}

StateProblem constant() {
  return from_exact("constant", [](double, const Point&) { return 1.5; },
                    [](double, const Point&) { return 0.0; });
}

}  // namespace

double manufactured_residual(const StateProblem& problem, int samples) {
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double dt = 1e-4;
  const double dx = 1e-3;
  const auto& y = problem.exact;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = 0.1 + (problem.horizon - 0.1) * unit(rng);
    const Point x(unit(rng), unit(rng));
    const double y_t = (y(t + dt, x) - y(t - dt, x)) / (2.0 * dt);
    double laplace = 0.0;
    for (int dim = 0; dim < 2; ++dim) {
      Point e = Point::Zero();
      e[dim] = dx;
      laplace += (y(t, x + e) - 2.0 * y(t, x) + y(t, x - e)) / (dx * dx);
    }
    worst = std::max(worst, std::abs(y_t - laplace - problem.data.f(t, x)));
  }
  return worst;
}

std::vector<std::string> state_problem_ids() {
  return {"smooth-inhomogeneous", "rough-boundary", "constant"};
}

StateProblem manufactured_state_problem(std::string_view id) {
  StateProblem p;
  if (id == "smooth-inhomogeneous") {
    p = smooth_inhomogeneous();
  } else if (id == "rough-boundary") {
    p = rough_boundary();
  } else if (id == "constant") {
    p = constant();
  } else {
    throw Error(ErrorCode::kUnknownProblem, fmt::format("unknown state problem '{}'", id));
  }
  const double residual = manufactured_residual(p);
  if (!(residual <= kManufacturedGateTol)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("problem '{}' fails the finite-difference check: residual {:.3e}", id,
                            residual));
  }
  return p;
}

std::vector<std::string> control_problem_ids() { return {"active-box", "unconstrained"}; }

ControlSetup manufactured_control_problem(std::string_view id) {
  ControlSetup s;
  s.id = std::string(id);
  s.problem.alpha = 0.1;
  s.problem.target = SpaceTimeFunction([](double t, const Point& x) {
    return 2.0 * std::sin(std::numbers::pi * t) * std::cos(std::numbers::pi * x.x());
  });
  if (id == "active-box") {
    s.problem.bounds = {-0.5, 0.5};
  } else if (id != "unconstrained") {
    throw Error(ErrorCode::kUnknownProblem, fmt::format("unknown control problem '{}'", id));
  }
  return s;
}

}  // namespace pdbc
