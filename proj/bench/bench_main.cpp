// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/green.hpp"
#include "vortexlab/kernels.hpp"
#include "vortexlab/stream_solver.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <random>

using namespace vortexlab;

namespace {

std::shared_ptr<const GridSystem> grid(int n) {
  static std::map<int, std::shared_ptr<const GridSystem>> cache;
  auto& g = cache[n];
  if (!g) g = GridSystem::build(Domain::unit_disk(), n);
  return g;
}

Eigen::VectorXd random_vector(int n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_EvalSource(benchmark::State& state) {
  const auto g = grid(static_cast<int>(state.range(0)));
  const Eigen::VectorXd psi = random_vector(g->unknowns());
  const std::vector<int> mask(g->unknowns(), 0);
  SourceTerms out;
  for (auto _ : state) {
    eval_source(mask, psi, {0.5}, 1e4, 2.0, g->h() * g->h(), true, exec_of(state), out);
    benchmark::DoNotOptimize(out.f.data());
  }
}
BENCHMARK(BM_EvalSource)->ArgsProduct({{257, 513}, {0, 1}});

void BM_ApplyRows(benchmark::State& state) {
  const auto g = grid(static_cast<int>(state.range(0)));
  const Eigen::VectorXd x = random_vector(g->unknowns());
  for (auto _ : state) benchmark::DoNotOptimize(apply_rows(g->laplacian_rows(), x, exec_of(state)));
}
BENCHMARK(BM_ApplyRows)->ArgsProduct({{257, 513}, {0, 1}});

void BM_CentralGradient(benchmark::State& state) {
  const auto g = grid(static_cast<int>(state.range(0)));
  const Eigen::VectorXd f = random_vector(g->node_count());
  Eigen::VectorXd gx, gy;
  for (auto _ : state) {
    central_gradient(*g, f, exec_of(state), gx, gy);
    benchmark::DoNotOptimize(gx.data());
  }
}
BENCHMARK(BM_CentralGradient)->ArgsProduct({{257, 513}, {0, 1}});

void BM_PoissonSolve(benchmark::State& state) {
  const auto g = grid(static_cast<int>(state.range(0)));
  const Eigen::VectorXd rhs = random_vector(g->unknowns());
  for (auto _ : state) benchmark::DoNotOptimize(g->solve(rhs));
}
BENCHMARK(BM_PoissonSolve)->Arg(257)->Arg(513)->Unit(benchmark::kMillisecond);

void BM_GreenEvaluation(benchmark::State& state) {
  GreenOptions o;
  o.force_mfs = state.range(0) != 0;
  const GreenEvaluator ev = GreenEvaluator::build(Domain::unit_disk(), o);
  const Vec2 x(0.3, -0.1), y(-0.2, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(ev.green(x, y));
}
BENCHMARK(BM_GreenEvaluation)->Arg(0)->Arg(1);

void BM_StreamSolve(benchmark::State& state) {
  const GreenEvaluator ev = GreenEvaluator::build(Domain::unit_disk());
  SolveSpec s;
  s.centers = {Vec2::Zero()};
  s.strengths = {1.0};
  s.lambda = 1e4;
  s.p = 2.0;
  s.delta = 0.5;
  s.grid_n = static_cast<int>(state.range(0));
  s.exec = exec_of(state);
  const auto g = grid(s.grid_n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_stream_function(ev, s, nullptr, g).psi.data());
}
BENCHMARK(BM_StreamSolve)->ArgsProduct({{129, 257}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
