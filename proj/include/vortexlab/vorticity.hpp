// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/stream_solver.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace vortexlab {

// Penalty density F_*(s) = p s^{(p+1)/p} / (p+1), the primitive of the
// inverse of t -> t^p.
double penalty_density(double s, double p);

struct TurkingtonOptions {
  double cap = 0.0;                 // Lambda; <= 0 selects 10 (amp phi0)^p of the predicted core
  double tol = 1e-12;               // max |omega_{n+1} - omega_n| / max omega_{n+1}
  int max_iterations = 5000;
  int stall_window = 20;            // stop after this many iterations without energy increase
  bool restrict_to_mask = false;    // support only in B_delta(center), as in the stream problem
};

// Energy maximizer over { 0 <= omega <= lambda Lambda, int omega = kappa }.
struct VorticityField {
  std::shared_ptr<const GridSystem> grid;
  Eigen::VectorXd omega;            // per unknown
  Eigen::VectorXd psi;              // node field, A psi = omega, 0 on the boundary
  double level = 0.0;               // t with omega = min(lambda Lambda, lambda (psi - t)_+^p)
  double mu = 0.0;                  // Lagrange level, reported as -t
  double cap = 0.0;                 // Lambda
  double energy = 0.0;
  std::vector<double> energy_history;
  int iterations = 0;
  double omega_change = 0.0;        // last relative update
  double mass = 0.0;
  bool cap_active = false;
  std::vector<std::string> warnings;
};

// Energy h^2 (omega . psi / 2 - lambda sum F_*(omega / lambda)).
double vorticity_energy(const GridSystem& grid, const Eigen::VectorXd& omega, const Eigen::VectorXd& psi_unknowns,
                        double lambda, double p);

// Monotone ascent omega <- min(lambda Lambda, lambda (A^{-1} omega - t)_+^p) with t fixing the mass.
// Requires one vortex. Throws InvalidArgument or NoConvergence; an active cap is a warning.
VorticityField maximize_vorticity_energy(const GreenEvaluator& ev, const SolveSpec& spec,
                                         const TurkingtonOptions& options = {},
                                         std::shared_ptr<const GridSystem> grid = nullptr);

struct MethodComparison {
  StreamSolution stream;
  VorticityField vorticity;
  double psi_relative_discrepancy = 0.0;  // max |psi_T - psi_S| / max |psi_S|
  double level_difference = 0.0;         // |t - kappa-tilde|
  double support_symdiff_area = 0.0;     // cells in exactly one vorticity support, times h^2
  double support_bound = 0.0;            // 4 h (contour length)
};

// Solves both problems on the same grid. The vorticity route uses no mask,
// so the stream problem must have its core well inside its mask.
MethodComparison compare_methods(const GreenEvaluator& ev, const SolveSpec& spec,
                                 const TurkingtonOptions& options = {});

struct ProbeTrial {
  std::string label;
  bool converged = false;
  std::string error;
  std::vector<double> cut_levels;
  int iterations = 0;
  Eigen::VectorXd psi;              // node field; empty when not converged
};

struct ProbeDiscrepancy {
  int a = 0;
  int b = 0;
  double value = 0.0;               // max |psi_a - psi_b| / max |psi_a|
};

struct UniquenessReport {
  std::vector<ProbeTrial> trials;
  std::vector<ProbeDiscrepancy> table;
  double max_discrepancy = 0.0;
  double tolerance = 0.0;           // 10 x the PDE tolerance
  bool all_converged = false;
  bool unique = false;
};

// Randomized starting points drawn from a 64-bit Mersenne twister seeded with
// seed + trial: core shifted by up to half its radius, psi scaled by up to
// 10 percent, cut levels moved by up to 10 percent. The Turkington route is
// added as a further trial for one vortex when n_trials > 1. Throws
// InvalidArgument when the mask centers are not near a nondegenerate critical
// point of W.
UniquenessReport uniqueness_probe(const GreenEvaluator& ev, const SolveSpec& spec, int n_trials, std::uint64_t seed);

}  // namespace vortexlab
