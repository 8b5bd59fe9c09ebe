// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"
#include "test_util.hpp"
#include "vortexlab/cores.hpp"
#include "vortexlab/diagnostics.hpp"
#include "vortexlab/vorticity.hpp"

#include <cmath>
#include <map>

using namespace vortexlab;

namespace {

const GreenEvaluator& disk() {
  static const GreenEvaluator ev = GreenEvaluator::build(Domain::unit_disk());
  return ev;
}

SolveSpec centered(double lambda, double p, int n) {
  SolveSpec s;
  s.centers = {Vec2::Zero()};
  s.strengths = {1.0};
  s.lambda = lambda;
  s.p = p;
  s.delta = 0.5;
  s.grid_n = n;
  return s;
}

// Centered disk solutions, p = 2, lambda = 1e4, cached by grid size.
const StreamSolution& centered_solution(int n) {
  static std::map<int, StreamSolution> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, solve_stream_function(disk(), centered(1e4, 2.0, n))).first;
  return it->second;
}

// Same-sign pair at the critical point of W in a peanut-shaped domain.
const GreenEvaluator& peanut() {
  static const GreenEvaluator ev = [] {
    GreenOptions o;
    o.tol = 1e-6;
    return GreenEvaluator::build(load_boundary_csv(VORTEXLAB_CONFIG_DIR "/peanut.csv"), o);
  }();
  return ev;
}

const StreamSolution& pair_solution() {
  static const StreamSolution sol = [] {
    SolveSpec s;
    s.centers = {Vec2(0.79, 0.0), Vec2(-0.79, 0.0)};
    s.strengths = {1.0, 1.0};
    s.lambda = 1e4;
    s.p = 2.0;
    s.delta = 0.3;
    s.grid_n = 257;
    return solve_stream_function(peanut(), s);
  }();
  return sol;
}

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(SolveStreamFunction, MatchesRadialOracleAtSecondOrder) {
  // exact centered vortex from the radial ODE; errors fall ~4x per halving.
  const oracle::RadialVortex o = oracle::centered_disk_vortex(1e4, 2.0, 1.0);
  double prev_cut = 0.0, prev_peak = 0.0;
  for (int n : {129, 257, 513}) {
    const StreamSolution& sol = centered_solution(n);
    const auto cores = measure_vortex_cores(sol);
    const double ec = std::abs(sol.cut_levels[0] - o.cut_level), ep = std::abs(cores[0].peak_value - o.peak);
    EXPECT_LT(ec, 1e-2 * o.cut_level);
    EXPECT_LT(ep, 2e-2 * o.peak);
    if (prev_cut > 0.0) {
      EXPECT_GT(prev_cut / ec, 3.0) << "n=" << n;
      EXPECT_GT(prev_peak / ep, 3.0) << "n=" << n;
    }
    prev_cut = ec, prev_peak = ep;
    EXPECT_LE(cores[0].peak.norm(), 2.0 * sol.grid->h());
    EXPECT_NEAR(cores[0].radius, o.core_radius, 2.0 * sol.grid->h());
  }
}

TEST(SolveStreamFunction, CutLevelRefinementIsSecondOrder) {
  // differences between successive grids shrink ~4x.
  const double c1 = centered_solution(129).cut_levels[0], c2 = centered_solution(257).cut_levels[0],
               c3 = centered_solution(513).cut_levels[0];
  EXPECT_GT(std::abs(c2 - c1) / std::abs(c3 - c2), 3.0);
}

TEST(SolveStreamFunction, EmptyCoreBelowThreshold) {
  // the radial core radius sqrt(A^{1-p} / lambda) exceeds the mask for small lambda.
  const oracle::RadialVortex o = oracle::centered_disk_vortex(100.0, 2.0, 1.0);
  ASSERT_GT(o.core_radius, 0.5);
  EXPECT_ERROR_CODE(solve_stream_function(disk(), centered(100.0, 2.0, 129)), ErrorCode::EmptyCore);
}

TEST(SolveStreamFunction, MassAndMaximumPrinciple) {
  for (const StreamSolution* sol : {&centered_solution(257), &pair_solution()}) {
    const GridSystem& g = *sol->grid;
    EXPECT_LE(sol->pde_residual, 1e-10);
    for (std::size_t j = 0; j < sol->strengths.size(); ++j) {
      // Mass recomputed from psi on the mask.
      double m = 0.0;
      for (int u = 0; u < g.unknowns(); ++u) {
        if (sol->mask_of[u] != static_cast<int>(j)) continue;
        const double t = sol->psi[g.unknown_node(u)] - sol->cut_levels[j];
        if (t > 0.0) m += sol->lambda * t * t;
      }
      m *= g.h() * g.h();
      EXPECT_NEAR(m, sol->strengths[j], 1e-8 * sol->strengths[j]);
      EXPECT_NEAR(sol->masses[j], sol->strengths[j], 1e-8 * sol->strengths[j]);
    }
    for (int u = 0; u < g.unknowns(); ++u) {
      const int f = g.unknown_node(u);
      EXPECT_GE(sol->psi[f], 0.0);
      // Nodes in the outer ring of each mask stay below its cut level.
      const int j = sol->mask_of[u];
      if (j >= 0 && (g.node(f) - sol->centers[j]).norm() > sol->delta - 2.0 * g.h())
        EXPECT_LT(sol->psi[f], sol->cut_levels[j]);
    }
  }
}

TEST(SolveStreamFunction, ResolutionWarning) {
  SolveSpec s = centered(1e4, 2.0, 33);
  const StreamSolution sol = solve_stream_function(disk(), s);
  ASSERT_FALSE(sol.warnings.empty());
  EXPECT_NE(sol.warnings[0].find("ResolutionWarning"), std::string::npos);
  EXPECT_TRUE(centered_solution(257).warnings.empty());
}

TEST(SolveStreamFunction, DeterministicRerun) {
  SolveSpec s = centered(1e4, 2.0, 129);
  s.exec = Exec::Serial;
  const StreamSolution a = solve_stream_function(disk(), s), b = solve_stream_function(disk(), s);
  EXPECT_EQ(max_abs(a.psi - b.psi), 0.0);
  EXPECT_EQ(a.cut_levels, b.cut_levels);
}

TEST(SolveStreamFunction, LinearAndSublinearExponents) {
  // Small cores: r = 0.024 for p = 1 and 0.012 for p = 0.5.
  for (double p : {0.5, 1.0}) {
    SolveSpec s = centered(1e4, p, p < 1.0 ? 513 : 257);
    const StreamSolution sol = solve_stream_function(disk(), s);
    EXPECT_LE(sol.pde_residual, s.pde_tol);
    EXPECT_LE(sol.mass_error, s.mass_tol);
    const oracle::RadialVortex o = oracle::centered_disk_vortex(1e4, p, 1.0);
    EXPECT_NEAR(sol.cut_levels[0], o.cut_level, 2e-2 * o.cut_level) << "p=" << p;
  }
}

TEST(MaximizeVorticityEnergy, PenaltyDensity) {
  // F_*(s) = int_0^s r^{1/p} dr.
  for (double p : {0.5, 1.0, 2.0, 3.0})
    for (double s : {0.0, 0.3, 2.0}) EXPECT_NEAR(penalty_density(s, p), p * std::pow(s, (p + 1) / p) / (p + 1), 1e-15);
  EXPECT_EQ(penalty_density(-1.0, 2.0), 0.0);
  EXPECT_NEAR(penalty_density(2.0, 2.0), 2.0 / 3.0 * std::pow(2.0, 1.5), 1e-14);
}

TEST(MaximizeVorticityEnergy, AscentAndLevelTrend) {
  std::vector<double> mu;
  for (double lambda : {1e2, 1e3, 1e4}) {
    SolveSpec s = centered(lambda, 2.0, 257);
    const VorticityField v = maximize_vorticity_energy(disk(), s);
    // energy nondecreasing.
    for (std::size_t a = 1; a < v.energy_history.size(); ++a)
      EXPECT_GE(v.energy_history[a], v.energy_history[a - 1] - 1e-12);
    EXPECT_NEAR(v.mass, 1.0, 1e-10);
    EXPECT_GE(v.omega.minCoeff(), 0.0);
    EXPECT_LE(v.omega.maxCoeff(), lambda * v.cap);
    EXPECT_FALSE(v.cap_active);
    mu.push_back(-v.mu);
  }
  // -mu grows like ln lambda; for one vortex the slope is kappa / (4 pi) per unit ln lambda.
  for (int a = 1; a < 3; ++a) {
    const double slope = (mu[a] - mu[a - 1]) / std::log(10.0);
    EXPECT_GT(slope, 0.5 / (4 * kPi));
    EXPECT_LT(slope, 2.0 / (4 * kPi));
  }
}

TEST(CompareMethods, AgreeOnMatchedGrid) {
  const MethodComparison c = compare_methods(disk(), centered(1e4, 2.0, 257));
  EXPECT_LE(c.psi_relative_discrepancy, 1e-2);
  EXPECT_LE(c.support_symdiff_area, c.support_bound);
  const MethodComparison d = compare_methods(disk(), centered(1e4, 2.0, 257));
  EXPECT_EQ(max_abs(c.stream.psi - d.stream.psi), 0.0);
  EXPECT_EQ(max_abs(c.vorticity.psi - d.vorticity.psi), 0.0);
}

TEST(UniquenessProbe, SingleTrialHasEmptyTable) {
  const UniquenessReport r = uniqueness_probe(disk(), centered(1e4, 2.0, 129), 1, 5);
  EXPECT_EQ(r.trials.size(), 1u);
  EXPECT_TRUE(r.table.empty());
  EXPECT_TRUE(r.all_converged);
}

TEST(UniquenessProbe, SameSeedSameReport) {
  const SolveSpec s = centered(1e4, 2.0, 129);
  const UniquenessReport a = uniqueness_probe(disk(), s, 3, 77), b = uniqueness_probe(disk(), s, 3, 77);
  ASSERT_EQ(a.trials.size(), 4u);
  ASSERT_EQ(a.table.size(), b.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) EXPECT_EQ(a.table[i].value, b.table[i].value);
  for (std::size_t i = 0; i < a.trials.size(); ++i) EXPECT_EQ(max_abs(a.trials[i].psi - b.trials[i].psi), 0.0);
  EXPECT_EQ(a.tolerance, 10.0 * s.pde_tol);
}

TEST(UniquenessProbe, RejectsMasksAwayFromCriticalPoints) {
  SolveSpec s = centered(1e4, 2.0, 129);
  s.centers = {Vec2(0.5, 0.0)};
  s.delta = 0.2;
  EXPECT_ERROR_CODE(uniqueness_probe(disk(), s, 2, 1), ErrorCode::InvalidArgument);
}

TEST(RecoverVelocityPressure, DivergenceAndTangentialFlow) {
  double prev = 0.0;
  for (int n : {129, 257, 513}) {
    const StreamSolution& sol = centered_solution(n);
    const FlowFields fl = recover_velocity_pressure(sol);
    EXPECT_LE(fl.max_divergence, 1e-12 * fl.max_speed / sol.grid->h());
    // radial symmetry: the radial velocity is a discretisation error.
    double vr = 0.0;
    for (int u = 0; u < sol.grid->unknowns(); ++u) {
      const int f = sol.grid->unknown_node(u);
      const Vec2 x = sol.grid->node(f);
      if (x.norm() < 1e-12 || x.norm() > 0.9) continue;
      vr = std::max(vr, std::abs(Vec2(fl.vx[f], fl.vy[f]).dot(x) / x.norm()));
    }
    EXPECT_LE(vr, 1e-2 * fl.max_speed);
    if (prev > 0.0) EXPECT_GT(prev / vr, 3.0);
    prev = vr;
  }
}

TEST(RecoverVelocityPressure, BernoulliImprovesUnderRefinement) {
  const auto c1 = measure_vortex_cores(centered_solution(129));
  const auto c2 = measure_vortex_cores(centered_solution(257));
  const BernoulliReport b1 = bernoulli_check(centered_solution(129), c1);
  const BernoulliReport b2 = bernoulli_check(centered_solution(257), c2);
  ASSERT_FALSE(b1.components.empty());
  ASSERT_FALSE(b2.components.empty());
  EXPECT_LT(b2.max_stdev, b1.max_stdev);
}

TEST(MeasureCores, SyntheticRadialField) {
  // psi = c + w(|x - x0| / s): the superlevel set {psi > c} is the disk of radius s * edge.
  const auto grid = GridSystem::build(Domain::unit_disk(), 257);
  const RadialProfile prof = solve_radial_profile(2.0);
  const Vec2 x0(0.11, -0.07);
  const double s = 0.1, c = 0.3;
  const Eigen::VectorXd field = sample_nodes(
      *grid, [&](const Vec2& x) { return c + eval_w(prof, (x - x0).norm() / s).value; }, Exec::Serial);
  const auto cores = measure_cores(*grid, field, {x0}, 0.4, {c}, {1.0});
  ASSERT_EQ(cores.size(), 1u);
  EXPECT_NEAR(cores[0].radius, s, grid->h());
  EXPECT_LE((cores[0].circle.center - x0).norm(), 2.0 * grid->h());
  EXPECT_LE((cores[0].peak - x0).norm(), 2.0 * grid->h());
  EXPECT_NEAR(cores[0].circle.radius, s, grid->h());
  EXPECT_LT(cores[0].circle.max_relative_deviation, 0.01);
  EXPECT_FALSE(cores[0].open);
}

TEST(MeasureCores, ErrorsOnEmptyAndOpenCores) {
  const auto grid = GridSystem::build(Domain::unit_disk(), 129);
  const Eigen::VectorXd bump = sample_nodes(
      *grid, [](const Vec2& x) { return std::max(0.0, 1.0 - x.squaredNorm()); }, Exec::Serial);
  EXPECT_ERROR_CODE(measure_cores(*grid, bump, {Vec2::Zero()}, 0.3, {2.0}, {1.0}), ErrorCode::EmptyCore);
  // The level circle |x| = 0.2236 leaves the mask about (0.25, 0).
  const Vec2 c(0.25, 0.0);
  EXPECT_ERROR_CODE(measure_cores(*grid, bump, {c}, 0.3, {0.95}, {1.0}), ErrorCode::OpenContour);
  const auto open = measure_cores(*grid, bump, {c}, 0.3, {0.95}, {1.0}, true);
  EXPECT_TRUE(open[0].open);
}

TEST(MeasureCores, CircleFit) {
  std::vector<Vec2> pts;
  for (int a = 0; a < 50; ++a) pts.push_back(Vec2(0.2, -0.3) + 0.07 * Vec2(std::cos(0.1 * a), std::sin(0.1 * a)));
  const CircleFit f = fit_circle(pts);
  EXPECT_LE((f.center - Vec2(0.2, -0.3)).norm(), 1e-12);
  EXPECT_NEAR(f.radius, 0.07, 1e-12);
  EXPECT_LE(f.max_relative_deviation, 1e-10);
}

TEST(AsymptoticReport, SyntheticExactCore) {
  // the exact centered vortex psi = cut + A w(r / s) has radius ratio 1
  // and strength ratio 2 ln(1/s) / ln(lambda).
  const double lambda = 1e4, p = 2.0;
  const RadialProfile prof = solve_radial_profile(p);
  const double A = 1.0 / (kTwoPi * std::abs(prof.dphi_edge));
  const double s = std::sqrt(std::pow(A, 1.0 - p) / lambda);
  const double cut = std::log(1.0 / s) / kTwoPi;
  StreamSolution sol;
  sol.grid = GridSystem::build(Domain::unit_disk(), 513);
  sol.psi = sample_nodes(*sol.grid, [&](const Vec2& x) { return cut + A * eval_w(prof, x.norm() / s).value; }, Exec::Serial);
  sol.cut_levels = {cut};
  sol.strengths = {1.0};
  sol.centers = {Vec2::Zero()};
  sol.lambda = lambda;
  sol.p = p;
  const auto cores = measure_cores(*sol.grid, sol.psi, sol.centers, 0.5, {cut}, {1.0});
  const auto rows = asymptotic_report(sol, cores, prof);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].strength_ratio, 2.0 * std::log(1.0 / s) / std::log(lambda), 1e-12);
  EXPECT_NEAR(rows[0].radius_ratio, 1.0, 1e-3);
  EXPECT_NEAR(rows[0].size_monitor, lambda * 4 * cores[0].radius * cores[0].radius, 1e-12);
}

TEST(AsymptoticReport, LinearRadiusRatio) {
  const RadialProfile prof = solve_radial_profile(1.0);
  StreamSolution sol;
  sol.lambda = 1e4;
  sol.p = 1.0;
  sol.strengths = {2.0};
  sol.cut_levels = {1.5};
  CoreMeasurement m;
  m.radius = 1.1 * prof.edge_radius / 100.0;
  const auto rows = asymptotic_report(sol, {m}, prof);
  EXPECT_NEAR(rows[0].radius_ratio, 1.1, 1e-12);
  EXPECT_NEAR(rows[0].strength_ratio, 4 * kPi * 1.5 / (2.0 * std::log(1e4)), 1e-12);
}

TEST(ResidualAgainstAnsatz, SelfComparisonIsZero) {
  const auto prof = std::make_shared<const RadialProfile>(solve_radial_profile(2.0));
  const AnsatzParams P = assemble_ansatz(disk(), 1e-3, {1.0}, {Vec2(0.1, 0.05)}, prof);
  const AnsatzField U(disk(), P);
  StreamSolution sol;
  sol.grid = GridSystem::build(Domain::unit_disk(), 129);
  const double c = 2.5;
  sol.psi = sample_nodes(*sol.grid, [&](const Vec2& x) { return U.value(x) / c; }, Exec::Serial);
  const AnsatzResidual r = residual_against_field(sol, c, U);
  EXPECT_LE(r.max_norm, 1e-14);
  EXPECT_EQ(r.max_core_radius, P.core_radii[0]);
}

TEST(ResidualAgainstAnsatz, MisCenteredAnsatzIsWorse) {
  // shifting the ansatz by 5 s costs at least 5x in max norm.
  const StreamSolution& sol = centered_solution(257);
  const auto cores = measure_vortex_cores(sol);
  const RadialProfile prof = solve_radial_profile(2.0);
  const AnsatzComparison cmp = residual_against_ansatz(disk(), sol, cores, prof);
  const double s = cmp.params.core_radii[0];
  const AnsatzParams shifted = assemble_ansatz(disk(), cmp.scaling.eps, cmp.scaling.kappa_lambda,
                                               {cores[0].peak + Vec2(5.0 * s, 0.0)},
                                               std::make_shared<const RadialProfile>(prof));
  const AnsatzResidual far = residual_against_field(sol, cmp.scaling.c, AnsatzField(disk(), shifted));
  EXPECT_GE(far.max_norm, 5.0 * cmp.residual.max_norm);
  EXPECT_GT(cmp.scaling.c, 0.0);
  EXPECT_NEAR(cmp.scaling.eps, 1.0 / std::sqrt(cmp.scaling.lambda_bar), 1e-15);
}
