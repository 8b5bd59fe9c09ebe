// SPDX-License-Identifier: Apache-2.0
// The OpenMP kernels against their serial reference paths: results must be
// bit-identical.
#include "test_util.hpp"
#include "vortexlab/diagnostics.hpp"
#include "vortexlab/kernels.hpp"
#include "vortexlab/vorticity.hpp"

#include <omp.h>

using namespace vortexlab;

namespace {

const GreenEvaluator& disk() {
  static const GreenEvaluator ev = GreenEvaluator::build(Domain::unit_disk());
  return ev;
}

std::shared_ptr<const GridSystem> grid() {
  static const auto g = GridSystem::build(Domain::unit_disk(), 129);
  return g;
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = testutil::uniform(rng, -1.0, 1.0);
  return v;
}

bool identical(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && std::equal(a.data(), a.data() + a.size(), b.data());
}

class ParallelKernels : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(GetParam());
  }
  void TearDown() override { omp_set_num_threads(saved_); }
  int saved_ = 1;
};

}  // namespace

TEST_P(ParallelKernels, EvalSource) {
  const int n = grid()->unknowns();
  const Eigen::VectorXd psi = random_vector(n, 1).cwiseAbs();
  std::vector<int> mask(n);
  for (int u = 0; u < n; ++u) mask[u] = u % 3 - 1;
  for (double p : {0.5, 1.0, 2.0}) {
    SourceTerms s, q;
    eval_source(mask, psi, {0.3, 0.5}, 1e3, p, 1e-4, true, Exec::Serial, s);
    eval_source(mask, psi, {0.3, 0.5}, 1e3, p, 1e-4, true, Exec::Parallel, q);
    EXPECT_TRUE(identical(s.f, q.f));
    EXPECT_TRUE(identical(s.df, q.df));
    EXPECT_EQ(s.mass, q.mass);
  }
}

TEST_P(ParallelKernels, ApplyRowsAndCappedPower) {
  const Eigen::VectorXd x = random_vector(grid()->unknowns(), 2);
  EXPECT_TRUE(identical(apply_rows(grid()->laplacian_rows(), x, Exec::Serial),
                        apply_rows(grid()->laplacian_rows(), x, Exec::Parallel)));
  EXPECT_TRUE(identical(capped_power(x, 0.1, 50.0, 1.5, 7.0, Exec::Serial),
                        capped_power(x, 0.1, 50.0, 1.5, 7.0, Exec::Parallel)));
  // The row kernel matches the sparse product.
  EXPECT_LE((apply_rows(grid()->laplacian_rows(), x, Exec::Parallel) - grid()->laplacian() * x).cwiseAbs().maxCoeff(),
            1e-9);
}

TEST_P(ParallelKernels, SampleNodesAndGradient) {
  auto fn = [](const Vec2& x) { return std::sin(3 * x.x()) * std::cos(2 * x.y()); };
  const Eigen::VectorXd a = sample_nodes(*grid(), fn, Exec::Serial), b = sample_nodes(*grid(), fn, Exec::Parallel);
  EXPECT_TRUE(identical(a, b));
  Eigen::VectorXd gx, gy, hx, hy;
  central_gradient(*grid(), a, Exec::Serial, gx, gy);
  central_gradient(*grid(), a, Exec::Parallel, hx, hy);
  EXPECT_TRUE(identical(gx, hx));
  EXPECT_TRUE(identical(gy, hy));
}

TEST_P(ParallelKernels, FullSolveAndFlow) {
  SolveSpec s;
  s.centers = {Vec2(0.1, -0.05)};
  s.strengths = {1.0};
  s.lambda = 1e4;
  s.p = 2.0;
  s.delta = 0.5;
  s.grid_n = 129;
  s.exec = Exec::Serial;
  const StreamSolution a = solve_stream_function(disk(), s, nullptr, grid());
  s.exec = Exec::Parallel;
  const StreamSolution b = solve_stream_function(disk(), s, nullptr, grid());
  EXPECT_TRUE(identical(a.psi, b.psi));
  EXPECT_EQ(a.cut_levels, b.cut_levels);
  const FlowFields fa = recover_velocity_pressure(a, Exec::Serial), fb = recover_velocity_pressure(a, Exec::Parallel);
  EXPECT_TRUE(identical(fa.vx, fb.vx));
  EXPECT_TRUE(identical(fa.pressure, fb.pressure));
  EXPECT_TRUE(identical(fa.divergence, fb.divergence));
  const auto cores = measure_vortex_cores(a);
  EXPECT_EQ(bernoulli_check(a, cores, {}, Exec::Serial).max_stdev, bernoulli_check(a, cores, {}, Exec::Parallel).max_stdev);
}

TEST_P(ParallelKernels, Turkington) {
  SolveSpec s;
  s.centers = {Vec2::Zero()};
  s.strengths = {1.0};
  s.lambda = 1e3;
  s.p = 2.0;
  s.grid_n = 129;
  s.exec = Exec::Serial;
  const VorticityField a = maximize_vorticity_energy(disk(), s, {}, grid());
  s.exec = Exec::Parallel;
  const VorticityField b = maximize_vorticity_energy(disk(), s, {}, grid());
  EXPECT_TRUE(identical(a.omega, b.omega));
  EXPECT_EQ(a.energy_history, b.energy_history);
}

INSTANTIATE_TEST_SUITE_P(Threads, ParallelKernels, ::testing::Values(1, 2, 4));
