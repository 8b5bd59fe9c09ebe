// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/vorticity.hpp"

#include "vortexlab/cores.hpp"
#include "vortexlab/kirchhoff_routh.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace vortexlab {

double penalty_density(double s, double p) {
  if (s <= 0.0) return 0.0;
  return p * std::pow(s, (p + 1.0) / p) / (p + 1.0);
}

double vorticity_energy(const GridSystem& grid, const Eigen::VectorXd& omega, const Eigen::VectorXd& psi_unknowns,
                        double lambda, double p) {
  const double h2 = grid.h() * grid.h();
  double quad = 0.0, pen = 0.0;
  for (Eigen::Index u = 0; u < omega.size(); ++u) {
    quad += omega[u] * psi_unknowns[u];
    pen += penalty_density(omega[u] / lambda, p);
  }
  return h2 * (0.5 * quad - lambda * pen);
}

namespace {

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Mass h^2 sum min(lambda Lambda, lambda (psi - t)_+^p) over allowed unknowns.
double capped_mass(const Eigen::VectorXd& psi, const std::vector<char>& allowed, double t, double lambda, double p,
                   double cap_value, double h2) {
  double s = 0.0;
  for (Eigen::Index u = 0; u < psi.size(); ++u) {
    if (!allowed[u]) continue;
    const double d = psi[u] - t;
    if (d > 0.0) s += std::min(cap_value, lambda * std::pow(d, p));
  }
  return h2 * s;
}

// Level t with capped_mass(t) = kappa; the mass is nonincreasing in t.
double mass_level(const Eigen::VectorXd& psi, const std::vector<char>& allowed, double lambda, double p,
                  double cap_value, double h2, double kappa) {
  double hi = -std::numeric_limits<double>::infinity();
  int count = 0;
  for (Eigen::Index u = 0; u < psi.size(); ++u)
    if (allowed[u]) hi = std::max(hi, psi[u]), ++count;
  if (count == 0 || cap_value * h2 * count < kappa)
    fail(ErrorCode::InvalidArgument, "turkington: cap too small to carry the prescribed strength");
  auto g = [&](double t) { return capped_mass(psi, allowed, t, lambda, p, cap_value, h2) - kappa; };
  double d = std::pow(kappa / (lambda * h2), 1.0 / p);
  double lo = hi - d;
  while (g(lo) < 0.0) {
    d *= 2.0;
    lo = hi - d;
  }
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
  const auto r = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

VorticityField maximize_vorticity_energy(const GreenEvaluator& ev, const SolveSpec& spec,
                                         const TurkingtonOptions& options, std::shared_ptr<const GridSystem> grid) {
  if (spec.centers.size() != 1 || spec.strengths.size() != 1)
    fail(ErrorCode::InvalidArgument, "turkington: exactly one vortex is supported");
  validate_spec(ev.domain(), spec);
  if (!grid || grid->n() != spec.grid_n) grid = GridSystem::build(ev.domain(), spec.grid_n);
  const double h2 = grid->h() * grid->h();
  const double kappa = spec.strengths[0];
  const RadialProfile profile = solve_radial_profile(spec.p);
  const CorePrediction cp = predict_core(profile, spec.lambda, kappa);

  VorticityField out;
  out.grid = grid;
  out.cap = options.cap > 0.0 ? options.cap : 10.0 * std::pow(cp.amplitude * profile.phi0, spec.p);
  const double cap_value = spec.lambda * out.cap;

  std::vector<char> allowed(grid->unknowns(), 1);
  if (options.restrict_to_mask) {
    const double delta = spec.delta > 0.0 ? spec.delta : default_mask_radius(ev.domain(), spec.centers);
    const std::vector<int> mask = build_masks(*grid, spec.centers, delta);
    for (int u = 0; u < grid->unknowns(); ++u) allowed[u] = mask[u] >= 0;
  }

  Eigen::VectorXd omega = predicted_vorticity(*grid, spec, profile, initial_core_centers(ev, spec, profile));
  for (int u = 0; u < grid->unknowns(); ++u)
    if (!allowed[u]) omega[u] = 0.0;
  omega = omega.cwiseMin(cap_value);
  omega *= kappa / (h2 * omega.sum());
  Eigen::VectorXd psi = grid->solve(omega);
  double energy = vorticity_energy(*grid, omega, psi, spec.lambda, spec.p);
  out.energy_history.push_back(energy);

  bool converged = false;
  int stalled = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const double t = mass_level(psi, allowed, spec.lambda, spec.p, cap_value, h2, kappa);
    Eigen::VectorXd next = capped_power(psi, t, spec.lambda, spec.p, cap_value, spec.exec);
    for (int u = 0; u < grid->unknowns(); ++u)
      if (!allowed[u]) next[u] = 0.0;
    const double change = max_abs(next - omega) / max_abs(next);
    omega = std::move(next);
    psi = grid->solve(omega);
    const double e = vorticity_energy(*grid, omega, psi, spec.lambda, spec.p);
    stalled = e > energy ? 0 : stalled + 1;
    energy = e;
    out.energy_history.push_back(energy);
    out.level = t;
    out.iterations = it;
    out.omega_change = change;
    if (change <= options.tol || stalled >= options.stall_window) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "turkington: no convergence after " << options.max_iterations << " iterations (relative update "
        << out.omega_change << ")";
    fail(ErrorCode::NoConvergence, msg.str());
  }
  // Level consistent with the final psi.
  out.level = mass_level(psi, allowed, spec.lambda, spec.p, cap_value, h2, kappa);
  out.mu = -out.level;
  out.omega = omega;
  out.psi = grid->scatter(psi);
  out.energy = energy;
  out.mass = h2 * ordered_sum(omega);
  out.cap_active = omega.maxCoeff() >= cap_value;
  if (out.cap_active) out.warnings.push_back("CapActive: the vorticity reaches the cap lambda*Lambda");
  return out;
}

MethodComparison compare_methods(const GreenEvaluator& ev, const SolveSpec& spec, const TurkingtonOptions& options) {
  MethodComparison cmp;
  cmp.stream = solve_stream_function(ev, spec);
  cmp.vorticity = maximize_vorticity_energy(ev, spec, options, cmp.stream.grid);
  const GridSystem& grid = *cmp.stream.grid;
  // The vorticity route has psi = 0 on the boundary and cut level t, the
  // stream route the same boundary value with cut kappa-tilde.
  cmp.psi_relative_discrepancy = max_abs(cmp.vorticity.psi - cmp.stream.psi) / max_abs(cmp.stream.psi);
  cmp.level_difference = std::abs(cmp.vorticity.level - cmp.stream.cut_levels[0]);
  int differ = 0;
  for (int u = 0; u < grid.unknowns(); ++u) {
    const int f = grid.unknown_node(u);
    const bool in_s = cmp.stream.mask_of[u] >= 0 && cmp.stream.psi[f] > cmp.stream.cut_levels[0];
    const bool in_t = cmp.vorticity.omega[u] > 0.0;
    if (in_s != in_t) ++differ;
  }
  cmp.support_symdiff_area = differ * grid.h() * grid.h();
  const auto cores = measure_vortex_cores(cmp.stream);
  cmp.support_bound = 4.0 * grid.h() * cores[0].contour_length;
  return cmp;
}

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

UniquenessReport uniqueness_probe(const GreenEvaluator& ev, const SolveSpec& spec, int n_trials, std::uint64_t seed) {
  if (n_trials < 1) fail(ErrorCode::InvalidArgument, "probe: n_trials must be >= 1");
  validate_spec(ev.domain(), spec);
  const double delta = spec.delta > 0.0 ? spec.delta : default_mask_radius(ev.domain(), spec.centers);
  {
    const CriticalPointReport rep = find_critical_point(ev, VortexConfig{spec.centers, spec.strengths});
    if (rep.classification == CriticalClass::Degenerate)
      fail(ErrorCode::InvalidArgument, "probe: the nearby critical point of W is degenerate");
    for (std::size_t j = 0; j < spec.centers.size(); ++j)
      if ((rep.location[j] - spec.centers[j]).norm() >= delta)
        fail(ErrorCode::InvalidArgument, "probe: mask centers are not near a critical point of W");
  }
  auto grid = GridSystem::build(ev.domain(), spec.grid_n);
  const RadialProfile profile = solve_radial_profile(spec.p);
  const std::vector<Vec2> base = initial_core_centers(ev, spec, profile);
  const int k = static_cast<int>(spec.centers.size());

  UniquenessReport rep;
  rep.tolerance = 10.0 * spec.pde_tol;
  for (int trial = 0; trial < n_trials; ++trial) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial));
    std::vector<Vec2> at = base;
    for (int j = 0; j < k; ++j) {
      const double r = 0.5 * predict_core(profile, spec.lambda, spec.strengths[j]).radius * unit_uniform(rng);
      const double a = kTwoPi * unit_uniform(rng);
      at[j] += r * Vec2(std::cos(a), std::sin(a));
    }
    StreamInit init = profile_initial_guess(*grid, spec, profile, at);
    init.psi *= 1.0 + 0.2 * (unit_uniform(rng) - 0.5);
    for (double& c : init.cut_levels) c *= 1.0 + 0.2 * (unit_uniform(rng) - 0.5);
    ProbeTrial t;
    t.label = "stream-" + std::to_string(trial);
    try {
      const StreamSolution sol = solve_stream_function(ev, spec, &init, grid);
      t.converged = true;
      t.cut_levels = sol.cut_levels;
      t.iterations = static_cast<int>(sol.history.size()) - 1;
      t.psi = sol.psi;
    } catch (const Error& e) {
      t.error = e.what();
    }
    rep.trials.push_back(std::move(t));
  }
  if (k == 1 && n_trials > 1) {
    ProbeTrial t;
    t.label = "turkington";
    try {
      const VorticityField vf = maximize_vorticity_energy(ev, spec, {}, grid);
      t.converged = true;
      t.cut_levels = {vf.level};
      t.iterations = vf.iterations;
      t.psi = vf.psi;
    } catch (const Error& e) {
      t.error = e.what();
    }
    rep.trials.push_back(std::move(t));
  }
  rep.all_converged = true;
  for (const ProbeTrial& t : rep.trials) rep.all_converged = rep.all_converged && t.converged;
  for (std::size_t a = 0; a < rep.trials.size(); ++a)
    for (std::size_t b = a + 1; b < rep.trials.size(); ++b) {
      if (!rep.trials[a].converged || !rep.trials[b].converged) continue;
      const double d = max_abs(rep.trials[a].psi - rep.trials[b].psi) / max_abs(rep.trials[a].psi);
      rep.table.push_back({static_cast<int>(a), static_cast<int>(b), d});
      rep.max_discrepancy = std::max(rep.max_discrepancy, d);
    }
  rep.unique = rep.all_converged && rep.max_discrepancy <= rep.tolerance;
  return rep;
}

}  // namespace vortexlab
