#include <cmath>

#include <benchmark/benchmark.h>

#include "pdbc/assembly.hpp"
#include "pdbc/control.hpp"
#include "pdbc/manufactured.hpp"
#include "pdbc/parabolic.hpp"

namespace {

using namespace pdbc;

void BM_Assemble(benchmark::State& state) {
  const Mesh mesh = unit_square_mesh(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(mesh));
  state.SetComplexityN(mesh.num_nodes());
}
BENCHMARK(BM_Assemble)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_StepSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Discretization d(unit_square_mesh(n), uniform_grid(1, 1.0 / n));
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(d.num_interior());
  for (auto _ : state) benchmark::DoNotOptimize(spd_solve(d.step_matrix(0), b, d.step_options()));
  state.SetComplexityN(d.num_interior());
}
BENCHMARK(BM_StepSolve)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_SolveState(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int M = static_cast<int>(state.range(1));
  const StateProblem problem = manufactured_state_problem("smooth-inhomogeneous");
  const Discretization d(unit_square_mesh(n), uniform_grid(M, problem.horizon));
  const StateInputs in = discretize(d, problem.data);
  for (auto _ : state) benchmark::DoNotOptimize(solve_state(d, in));
}
BENCHMARK(BM_SolveState)->Args({16, 64})->Args({32, 64})->Args({32, 256})->Unit(benchmark::kMillisecond);

void BM_ReducedGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ControlSetup setup = manufactured_control_problem("active-box");
  const Discretization d(unit_square_mesh(n), uniform_grid(n, setup.horizon));
  const ReducedProblem rp(d, setup.problem);
  const BoundaryField u = d.zero_boundary_field();
  for (auto _ : state) benchmark::DoNotOptimize(rp.reduced_gradient(u));
}
BENCHMARK(BM_ReducedGradient)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ProjectAdmissible(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Discretization d(unit_square_mesh(n), uniform_grid(16, 1.0));
  BoundaryField v = d.zero_boundary_field();
  for (auto& s : v.slabs) {
    for (int i = 0; i < s.size(); ++i) s[i] = std::sin(0.7 * i);
  }
  for (auto _ : state) benchmark::DoNotOptimize(project_admissible(d.ops(), v, {-0.5, 0.5}));
}
BENCHMARK(BM_ProjectAdmissible)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
