// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/ansatz.hpp"
#include "vortexlab/green.hpp"
#include "vortexlab/grid.hpp"
#include "vortexlab/kernels.hpp"
#include "vortexlab/radial_profile.hpp"

#include <memory>
#include <string>
#include <vector>

namespace vortexlab {

// Discrete free-boundary problem
//   -Lap psi = lambda sum_j 1_{B_delta(x_j)} (psi - c_j)_+^p in the domain, psi = 0 on the boundary,
//   lambda int_{B_delta(x_j)} (psi - c_j)_+^p = kappa_j,
// with the cut levels c_j (kappa-tilde) unknown.
// Newton: bordered Newton on (psi, c), semismooth at p = 1 and with the
// unbounded derivative kept as is for p < 1. Picard: damped fixed point with
// mass matching each sweep; it is linearly unstable near the discrete solution
// for p < 1 and is kept for comparison.
enum class InnerMethod { Newton, Picard };

struct SolveSpec {
  std::vector<Vec2> centers;        // mask centers x_{0,j}
  std::vector<double> strengths;    // kappa_j
  double lambda = 1e3;
  double p = 2.0;
  double delta = 0.0;               // mask radius; <= 0 selects default_mask_radius
  int grid_n = 257;
  double pde_tol = 1e-10;           // max |A psi - f| / max |f|
  double mass_tol = 1e-10;          // max relative mass error
  int max_iterations = 200;
  InnerMethod method = InnerMethod::Newton;
  double picard_relaxation = 0.5;
  // Newton falls back to blocks of energy-ascent sweeps when its line search
  // accepts less than ascent_switch_step.
  double ascent_switch_step = 1.0 / 64.0;
  int ascent_block = 500;
  int max_ascent_sweeps = 5000;
  double ascent_tol = 1e-7;         // relative vorticity change ending a block
  Exec exec = Exec::Parallel;
};

// 0.2 * min(pairwise center distance, distance from a center to the boundary).
double default_mask_radius(const Domain& domain, const std::vector<Vec2>& centers);

// Throws InvalidArgument / OutsideDomain on inconsistent input.
void validate_spec(const Domain& domain, const SolveSpec& spec);

struct IterationRecord {
  int iteration = 0;
  double pde_residual = 0.0;
  double mass_error = 0.0;
  double step = 1.0;
  bool ascent = false;              // energy-ascent sweep rather than a Newton/Picard step
};

// Starting point: a node field for psi and the cut levels.
struct StreamInit {
  Eigen::VectorXd psi;
  std::vector<double> cut_levels;
};

struct StreamSolution {
  std::shared_ptr<const GridSystem> grid;
  Eigen::VectorXd psi;              // node field, 0 off the unknowns
  std::vector<double> cut_levels;   // kappa-tilde_j
  std::vector<double> masses;
  std::vector<Vec2> centers;
  std::vector<double> strengths;
  double lambda = 0.0;
  double p = 0.0;
  double delta = 0.0;
  std::vector<int> mask_of;         // per unknown: mask id or -1
  std::vector<IterationRecord> history;
  double pde_residual = 0.0;
  double mass_error = 0.0;
  std::vector<std::string> warnings;
};

// Per-unknown mask ids for disks of radius delta about the centers.
std::vector<int> build_masks(const GridSystem& grid, const std::vector<Vec2>& centers, double delta);

// Radius and amplitude of the concentrated core predicted by the radial
// profile for strength kappa: psi - c = amp * phi(|x - x0| / radius).
struct CorePrediction {
  double radius;
  double amplitude;
};
CorePrediction predict_core(const RadialProfile& profile, double lambda, double kappa);

// Where the predicted cores are placed: a critical point of the
// Kirchhoff-Routh function reached from the mask centers when it keeps every
// core inside its mask, otherwise the minimizer of W over the positions that
// do (projected descent).
std::vector<Vec2> initial_core_centers(const GreenEvaluator& ev, const SolveSpec& spec, const RadialProfile& profile);

// Vorticity lambda (amp phi)^p of the predicted cores placed at core_centers,
// each scaled to mass kappa_j over the grid (cell area h^2). Cores below grid
// resolution collapse onto the nearest unknown.
Eigen::VectorXd predicted_vorticity(const GridSystem& grid, const SolveSpec& spec, const RadialProfile& profile,
                                    const std::vector<Vec2>& core_centers);

// Profile-based starting point: the predicted cores are placed at
// core_centers (mask centers when empty), psi solves the discrete Poisson
// problem for their vorticity, and the cut levels are fitted to the
// prescribed masses.
StreamInit profile_initial_guess(const GridSystem& grid, const SolveSpec& spec, const RadialProfile& profile,
                                 const std::vector<Vec2>& core_centers = {});

// Starting point from the ansatz U, mapped back by psi = U / scale and c_j = kappa_lambda_j / scale.
StreamInit ansatz_initial_guess(const GridSystem& grid, const AnsatzField& field, double scale);

// Throws NoConvergence or EmptyCore. A grid built for the same domain and grid_n may be passed in to
// reuse its factorization.
StreamSolution solve_stream_function(const GreenEvaluator& ev, const SolveSpec& spec,
                                     const StreamInit* init = nullptr,
                                     std::shared_ptr<const GridSystem> grid = nullptr);

}  // namespace vortexlab
