// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/stream_solver.hpp"

#include "vortexlab/kirchhoff_routh.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace vortexlab {

double default_mask_radius(const Domain& domain, const std::vector<Vec2>& centers) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    m = std::min(m, domain.boundary_distance(centers[i]));
    for (std::size_t j = i + 1; j < centers.size(); ++j) m = std::min(m, (centers[i] - centers[j]).norm());
  }
  return 0.2 * m;
}

void validate_spec(const Domain& domain, const SolveSpec& spec) {
  const std::size_t k = spec.centers.size();
  if (k == 0 || spec.strengths.size() != k)
    fail(ErrorCode::InvalidArgument, "solve: centers and strengths must have equal nonzero length");
  for (double s : spec.strengths)
    if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "solve: strengths must be positive");
  if (!(spec.lambda >= 1.0)) fail(ErrorCode::InvalidArgument, "solve: lambda must be >= 1");
  if (!(spec.p > 0.0)) fail(ErrorCode::InvalidExponent, "solve: p must be positive");
  if (spec.grid_n < 9) fail(ErrorCode::InvalidArgument, "solve: grid_n must be >= 9");
  const double delta = spec.delta > 0.0 ? spec.delta : default_mask_radius(domain, spec.centers);
  for (std::size_t i = 0; i < k; ++i) {
    if (!domain.contains(spec.centers[i])) fail(ErrorCode::OutsideDomain, "solve: mask center outside domain");
    if (domain.boundary_distance(spec.centers[i]) <= delta)
      fail(ErrorCode::InvalidArgument, "solve: mask disk leaves the domain");
    for (std::size_t j = i + 1; j < k; ++j)
      if ((spec.centers[i] - spec.centers[j]).norm() <= 2.0 * delta)
        fail(ErrorCode::InvalidArgument, "solve: mask disks overlap");
  }
}

std::vector<int> build_masks(const GridSystem& grid, const std::vector<Vec2>& centers, double delta) {
  std::vector<int> mask(grid.unknowns(), -1);
  for (int u = 0; u < grid.unknowns(); ++u) {
    const Vec2 x = grid.node(grid.unknown_node(u));
    for (std::size_t j = 0; j < centers.size(); ++j)
      if ((x - centers[j]).norm() < delta) mask[u] = static_cast<int>(j);
  }
  return mask;
}

CorePrediction predict_core(const RadialProfile& profile, double lambda, double kappa) {
  const double amp = kappa / profile_flux(profile);
  const double radius = profile.edge_radius / std::sqrt(lambda) * std::pow(amp, -(profile.p - 1.0) / 2.0);
  return {radius, amp};
}

namespace {

// Largest c with h^2 sum_{mask j} lambda (psi - c)_+^p >= kappa; the mass is
// nonincreasing in c. Returns false when even c = min psi cannot reach kappa.
bool match_cut_level(const Eigen::VectorXd& psi_u, const std::vector<int>& mask_of, int j, double lambda, double p,
                     double cell_area, double kappa, double* cut) {
  std::vector<double> vals;
  for (std::size_t u = 0; u < mask_of.size(); ++u)
    if (mask_of[u] == j) vals.push_back(psi_u[u]);
  if (vals.empty()) return false;
  auto mass = [&](double c) {
    double s = 0.0;
    for (double v : vals)
      if (v > c) s += std::pow(v - c, p);
    return lambda * cell_area * s - kappa;
  };
  const double hi = *std::max_element(vals.begin(), vals.end());
  double lo = *std::min_element(vals.begin(), vals.end());
  if (mass(lo) < 0.0) return false;
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
  const auto r = boost::math::tools::toms748_solve(mass, lo, hi, tol, iters);
  *cut = 0.5 * (r.first + r.second);
  return true;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

std::vector<Vec2> initial_core_centers(const GreenEvaluator& ev, const SolveSpec& spec, const RadialProfile& profile) {
  const double delta = spec.delta > 0.0 ? spec.delta : default_mask_radius(ev.domain(), spec.centers);
  const int k = static_cast<int>(spec.centers.size());
  std::vector<double> room(k);
  for (int j = 0; j < k; ++j)
    room[j] = std::max(delta - 1.0 * predict_core(profile, spec.lambda, spec.strengths[j]).radius, 0.0);
  auto admissible = [&](const std::vector<Vec2>& z) {
    for (int j = 0; j < k; ++j)
      if ((z[j] - spec.centers[j]).norm() > room[j]) return false;
    return true;
  };
  VortexConfig cfg{spec.centers, spec.strengths};
  try {
    const CriticalPointReport rep = find_critical_point(ev, cfg);
    if (admissible(rep.location)) return rep.location;
  } catch (const Error&) {
  }
  // Projected descent on W with step halving.
  auto project = [&](std::vector<Vec2>& z) {
    for (int j = 0; j < k; ++j) {
      const Vec2 d = z[j] - spec.centers[j];
      if (d.norm() > room[j]) z[j] = spec.centers[j] + d * (room[j] / d.norm());
    }
  };
  std::vector<Vec2> z = spec.centers;
  double w = kr_value(ev, {z, spec.strengths});
  double step = 0.5 * delta;
  const double floor = 1e-12 * ev.domain().diameter();
  for (int it = 0; it < 1000 && step > floor; ++it) {
    const Eigen::VectorXd g = kr_gradient(ev, {z, spec.strengths});
    if (g.norm() == 0.0) break;
    std::vector<Vec2> trial = z;
    for (int j = 0; j < k; ++j) trial[j] -= step * Vec2(g[2 * j], g[2 * j + 1]) / g.norm();
    project(trial);
    double moved = 0.0;
    for (int j = 0; j < k; ++j) moved = std::max(moved, (trial[j] - z[j]).norm());
    if (moved < floor) break;
    double wt = std::numeric_limits<double>::infinity();
    try {
      wt = kr_value(ev, {trial, spec.strengths});
    } catch (const Error&) {
    }
    if (wt < w) {
      z = trial;
      w = wt;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return z;
}

Eigen::VectorXd predicted_vorticity(const GridSystem& grid, const SolveSpec& spec, const RadialProfile& profile,
                                    const std::vector<Vec2>& core_centers) {
  const int k = static_cast<int>(core_centers.size());
  const double h2 = grid.h() * grid.h();
  Eigen::VectorXd omega = Eigen::VectorXd::Zero(grid.unknowns());
  for (int j = 0; j < k; ++j) {
    const CorePrediction cp = predict_core(profile, spec.lambda, spec.strengths[j]);
    Eigen::VectorXd core = Eigen::VectorXd::Zero(grid.unknowns());
    for (int u = 0; u < grid.unknowns(); ++u) {
      const double rho = (grid.node(grid.unknown_node(u)) - core_centers[j]).norm();
      if (rho < cp.radius) {
        const double v = eval_phi(profile, rho / cp.radius * profile.edge_radius).value;
        core[u] = spec.lambda * std::pow(cp.amplitude * std::max(v, 0.0), spec.p);
      }
    }
    const double total = h2 * ordered_sum(core);
    if (total > 0.0) {
      omega += core * (spec.strengths[j] / total);
    } else {
      // Core below grid resolution: a single node carries the mass.
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int u = 0; u < grid.unknowns(); ++u) {
        const double d = (grid.node(grid.unknown_node(u)) - core_centers[j]).norm();
        if (d < bd) bd = d, best = u;
      }
      omega[best] += spec.strengths[j] / h2;
    }
  }
  return omega;
}

StreamInit profile_initial_guess(const GridSystem& grid, const SolveSpec& spec, const RadialProfile& profile,
                                 const std::vector<Vec2>& core_centers) {
  const double delta = spec.delta > 0.0 ? spec.delta : default_mask_radius(grid.domain(), spec.centers);
  const int k = static_cast<int>(spec.centers.size());
  const std::vector<int> mask = build_masks(grid, spec.centers, delta);
  Eigen::VectorXd omega = predicted_vorticity(grid, spec, profile, core_centers.empty() ? spec.centers : core_centers);
  // Vorticity stays inside the masks.
  for (int u = 0; u < grid.unknowns(); ++u)
    if (mask[u] < 0) omega[u] = 0.0;
  const Eigen::VectorXd psi_u = grid.solve(omega);
  StreamInit init;
  init.psi = grid.scatter(psi_u);
  init.cut_levels.assign(k, 0.0);
  for (int j = 0; j < k; ++j) {
    double c = 0.0;
    if (!match_cut_level(psi_u, mask, j, spec.lambda, spec.p, grid.h() * grid.h(), spec.strengths[j], &c)) {
      const CorePrediction cp = predict_core(profile, spec.lambda, spec.strengths[j]);
      double peak = 0.0;
      for (int u = 0; u < grid.unknowns(); ++u)
        if (mask[u] == j) peak = std::max(peak, psi_u[u]);
      c = peak - cp.amplitude * profile.phi0;
    }
    init.cut_levels[j] = c;
  }
  return init;
}

StreamInit ansatz_initial_guess(const GridSystem& grid, const AnsatzField& field, double scale) {
  StreamInit init;
  init.psi = Eigen::VectorXd::Zero(grid.node_count());
  for (int u = 0; u < grid.unknowns(); ++u) {
    const int f = grid.unknown_node(u);
    init.psi[f] = field.value(grid.node(f)) / scale;
  }
  for (double c : field.params().cut_levels) init.cut_levels.push_back(c / scale);
  return init;
}

StreamSolution solve_stream_function(const GreenEvaluator& ev, const SolveSpec& spec, const StreamInit* init,
                                     std::shared_ptr<const GridSystem> grid) {
  const Domain& dom = ev.domain();
  validate_spec(dom, spec);
  if (!grid || grid->n() != spec.grid_n) grid = GridSystem::build(dom, spec.grid_n);
  const int k = static_cast<int>(spec.centers.size());
  const double delta = spec.delta > 0.0 ? spec.delta : default_mask_radius(dom, spec.centers);
  const double h2 = grid->h() * grid->h();

  StreamSolution sol;
  sol.grid = grid;
  sol.centers = spec.centers;
  sol.strengths = spec.strengths;
  sol.lambda = spec.lambda;
  sol.p = spec.p;
  sol.delta = delta;
  sol.mask_of = build_masks(*grid, spec.centers, delta);

  const RadialProfile profile = solve_radial_profile(spec.p);
  for (int j = 0; j < k; ++j) {
    const CorePrediction cp = predict_core(profile, spec.lambda, spec.strengths[j]);
    if (cp.radius >= delta) {
      std::ostringstream msg;
      msg << "predicted core radius " << cp.radius << " does not fit in mask radius " << delta
          << "; lambda too small for kappa " << spec.strengths[j];
      fail(ErrorCode::EmptyCore, msg.str());
    }
    if (grid->h() > cp.radius / 4.0) {
      std::ostringstream msg;
      msg << "ResolutionWarning: grid spacing " << grid->h() << " exceeds a quarter of the predicted core radius "
          << cp.radius << " (vortex " << j << ")";
      sol.warnings.push_back(msg.str());
    }
  }

  StreamInit start = init ? *init : profile_initial_guess(*grid, spec, profile, initial_core_centers(ev, spec, profile));
  if (start.psi.size() != grid->node_count() || static_cast<int>(start.cut_levels.size()) != k)
    fail(ErrorCode::InvalidArgument, "solve: initial guess does not match the grid");
  Eigen::VectorXd psi = grid->gather(start.psi);
  std::vector<double> cut = start.cut_levels;
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& Arows = grid->laplacian_rows();

  SourceTerms src;
  auto residuals = [&](Eigen::VectorXd& F1, std::vector<double>& F2, bool with_derivative) {
    eval_source(sol.mask_of, psi, cut, spec.lambda, spec.p, h2, with_derivative, spec.exec, src);
    F1 = apply_rows(Arows, psi, spec.exec) - src.f;
    F2.resize(k);
    for (int j = 0; j < k; ++j) F2[j] = src.mass[j] - spec.strengths[j];
  };
  auto measure = [&](const Eigen::VectorXd& F1, const std::vector<double>& F2, double* pde, double* mass) {
    const double fmax = max_abs(src.f);
    *pde = fmax > 0.0 ? max_abs(F1) / fmax : std::numeric_limits<double>::infinity();
    *mass = 0.0;
    for (int j = 0; j < k; ++j) *mass = std::max(*mass, std::abs(F2[j]) / spec.strengths[j]);
  };
  auto merit = [&](const Eigen::VectorXd& F1, const std::vector<double>& F2) {
    double m = h2 * h2 * F1.squaredNorm();
    for (double v : F2) m += v * v;
    return m;
  };
  auto empty_core_check = [&]() {
    for (int j = 0; j < k; ++j)
      if (!(src.mass[j] > 0.0)) fail(ErrorCode::EmptyCore, "superlevel set in mask " + std::to_string(j) + " vanished");
  };

  // omega <- lambda (psi - t_j)_+^p with t_j fixing each mass, then psi <- A^{-1} omega.
  // Each sweep increases the penalized energy. Returns the relative change of omega.
  Eigen::VectorXd omega_prev;
  int ascent_used = 0;
  auto ascent_sweep = [&]() {
    for (int j = 0; j < k; ++j) {
      double c = cut[j];
      if (!match_cut_level(psi, sol.mask_of, j, spec.lambda, spec.p, h2, spec.strengths[j], &c))
        fail(ErrorCode::EmptyCore, "mass cannot be matched in mask " + std::to_string(j));
      cut[j] = c;
    }
    eval_source(sol.mask_of, psi, cut, spec.lambda, spec.p, h2, false, spec.exec, src);
    const double change = omega_prev.size() ? max_abs(src.f - omega_prev) / max_abs(src.f) : 1.0;
    omega_prev = src.f;
    psi = grid->solve(src.f);
    return change;
  };

  Eigen::VectorXd F1;
  std::vector<double> F2;
  const bool newton = spec.method == InnerMethod::Newton;
  bool converged = false;
  for (int it = 0; it <= spec.max_iterations; ++it) {
    residuals(F1, F2, newton);
    empty_core_check();
    double pde = 0.0, merr = 0.0;
    measure(F1, F2, &pde, &merr);
    sol.history.push_back({it, pde, merr, it == 0 ? 0.0 : sol.history.back().step});
    if (pde <= spec.pde_tol && merr <= spec.mass_tol) {
      converged = true;
      break;
    }
    if (it == spec.max_iterations) break;

    if (newton) {
      // J11 = A - diag(df) factored once; bordered columns e_j = df restricted to mask j.
      Eigen::SparseMatrix<double> J = grid->laplacian();
      for (int u = 0; u < grid->unknowns(); ++u) J.coeffRef(u, u) -= src.df[u];
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(J);
      if (ldlt.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "solve: Newton matrix factorization failed");
      const Eigen::VectorXd z0 = ldlt.solve(-F1);
      std::vector<Eigen::VectorXd> e(k), z(k);
      for (int j = 0; j < k; ++j) {
        e[j] = Eigen::VectorXd::Zero(grid->unknowns());
        for (int u = 0; u < grid->unknowns(); ++u)
          if (sol.mask_of[u] == j) e[j][u] = src.df[u];
        z[j] = ldlt.solve(e[j]);
      }
      Eigen::MatrixXd S(k, k);
      Eigen::VectorXd rhs(k);
      for (int j = 0; j < k; ++j) {
        rhs[j] = -F2[j] - h2 * e[j].dot(z0);
        for (int l = 0; l < k; ++l) S(j, l) = -h2 * e[j].dot(z[l]);
        S(j, j) -= h2 * e[j].sum();
      }
      Eigen::VectorXd dcut = S.fullPivLu().solve(rhs);
      Eigen::VectorXd dpsi = z0;
      for (int j = 0; j < k; ++j) dpsi -= dcut[j] * z[j];
      if (!dpsi.allFinite() || !dcut.allFinite()) fail(ErrorCode::NoConvergence, "solve: non-finite Newton step");

      // Backtracking on the merit function.
      const double m0 = merit(F1, F2);
      const Eigen::VectorXd psi0 = psi;
      const std::vector<double> cut0 = cut;
      double step = 1.0;
      for (int ls = 0; ls < 40; ++ls) {
        psi = psi0 + step * dpsi;
        for (int j = 0; j < k; ++j) cut[j] = cut0[j] + step * dcut[j];
        Eigen::VectorXd G1;
        std::vector<double> G2;
        residuals(G1, G2, false);
        bool alive = true;
        for (int j = 0; j < k; ++j) alive = alive && src.mass[j] > 0.0;
        if (alive && merit(G1, G2) < (1.0 - 1e-4 * step) * m0) break;
        step *= 0.5;
      }
      sol.history.back().step = step;
      if (step < spec.ascent_switch_step) {
        // Newton is stuck far from the solution (typically a core that must
        // translate): run energy-ascent sweeps until the vorticity settles.
        for (int sweep = 0; sweep < spec.ascent_block && ascent_used < spec.max_ascent_sweeps; ++sweep, ++ascent_used) {
          const double change = ascent_sweep();
          sol.history.push_back({it, 0.0, 0.0, 1.0, true});
          if (change <= spec.ascent_tol) break;
        }
      }
    } else {
      // Damped Picard: match masses at the current psi, then relax toward A^{-1} f.
      for (int j = 0; j < k; ++j) {
        double c = cut[j];
        if (!match_cut_level(psi, sol.mask_of, j, spec.lambda, spec.p, h2, spec.strengths[j], &c))
          fail(ErrorCode::EmptyCore, "mass cannot be matched in mask " + std::to_string(j));
        cut[j] = c;
      }
      eval_source(sol.mask_of, psi, cut, spec.lambda, spec.p, h2, false, spec.exec, src);
      const Eigen::VectorXd target = grid->solve(src.f);
      psi = (1.0 - spec.picard_relaxation) * psi + spec.picard_relaxation * target;
      sol.history.back().step = spec.picard_relaxation;
    }
  }

  if (!converged) {
    std::ostringstream msg;
    msg << "solve: no convergence after " << spec.max_iterations << " iterations (pde residual "
        << sol.history.back().pde_residual << ", mass error " << sol.history.back().mass_error << ")";
    fail(ErrorCode::NoConvergence, msg.str());
  }
  for (int j = 0; j < k; ++j)
    if (!(cut[j] > 0.0)) fail(ErrorCode::EmptyCore, "cut level is not positive: the vorticity set fills the mask");
  sol.psi = grid->scatter(psi);
  sol.cut_levels = cut;
  sol.masses = src.mass;
  sol.pde_residual = sol.history.back().pde_residual;
  sol.mass_error = sol.history.back().mass_error;
  return sol;
}

}  // namespace vortexlab
