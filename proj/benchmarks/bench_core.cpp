#include <benchmark/benchmark.h>

#include <memory>

#include "opident/adjoint.hpp"
#include "opident/experiment.hpp"
#include "opident/state.hpp"

using namespace opident;

static void BM_AssembleStiffness(benchmark::State& state) {
  const Mesh mesh = build_mesh(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    SparseSpdMatrix a = assemble_stiffness(mesh);
    benchmark::DoNotOptimize(a.mat.valuePtr());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleStiffness)->Arg(32)->Arg(64)->Arg(128)->Complexity();

static void BM_StateSolve(benchmark::State& state) {
  RunConfig config = default_config(Preset::Example1);
  config.n_y = static_cast<int>(state.range(0));
  config.n_u = static_cast<int>(2 * config.r * config.n_y);
  const ProblemSetup setup = make_problem(config);
  DirichletSystem sys(setup.mesh);
  const PwcControl u(config.r, config.n_u, 1.0);
  for (auto _ : state) {
    StateResult res = solve_state(u, setup.params, sys, config.newton);
    benchmark::DoNotOptimize(res.y.values.data());
  }
}
BENCHMARK(BM_StateSolve)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_GradientChain(benchmark::State& state) {
  RunConfig config = default_config(Preset::Example1);
  config.n_y = static_cast<int>(state.range(0));
  config.n_u = static_cast<int>(2 * config.r * config.n_y);
  const ProblemSetup setup = make_problem(config);
  DirichletSystem sys(setup.mesh);
  const PwcControl u(config.r, config.n_u, 0.5);
  for (auto _ : state) {
    PwcControl g = l2_gradient(u, setup.params, sys, config.optim.q_points, config.newton);
    benchmark::DoNotOptimize(g.cells.data());
  }
}
BENCHMARK(BM_GradientChain)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_LevelSetQuadrature(benchmark::State& state) {
  RunConfig config = default_config(Preset::Example2);
  config.n_y = 64;
  config.n_u = static_cast<int>(state.range(0));
  const ProblemSetup setup = make_problem(config);
  DirichletSystem sys(setup.mesh);
  const PwcControl u(config.r, config.n_u, 0.1);
  const StateResult res = solve_state(u, setup.params, sys, config.newton);
  const NodalField p1 = solve_adjoint_p1(u, res.y, setup.params, sys);
  for (auto _ : state) {
    PwcControl p2 = compute_p2(p1, res.y, setup.params, config.n_u, config.optim.q_points);
    benchmark::DoNotOptimize(p2.cells.data());
  }
}
BENCHMARK(BM_LevelSetQuadrature)->Arg(128)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
