// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/ansatz.hpp"
#include "vortexlab/cores.hpp"
#include "vortexlab/kernels.hpp"
#include "vortexlab/stream_solver.hpp"

#include <vector>

namespace vortexlab {

// Asymptotic ratios per vortex; each tends to 1 as lambda grows.
struct AsymptoticRow {
  int vortex = 0;
  double lambda = 0.0;
  double p = 0.0;
  double strength = 0.0;        // kappa_j
  double cut_level = 0.0;       // kappa-tilde_j
  double radius = 0.0;          // measured r_j
  double strength_ratio = 0.0;  // 4 pi kappa-tilde / (kappa ln lambda)
  double radius_ratio = 0.0;    // kappa (lambda r^2)^{1/(p-1)} / (2 pi |phi'(1)|), or r sqrt(lambda) / gamma for p = 1
  double size_monitor = 0.0;    // lambda (2 r)^2
};

std::vector<AsymptoticRow> asymptotic_report(const StreamSolution& sol, const std::vector<CoreMeasurement>& cores,
                                             const RadialProfile& profile);
std::vector<AsymptoticRow> asymptotic_report(const StreamSolution& sol, const RadialProfile& profile);

// Map psi to u = c psi solving -Lap u = lambda_bar (u - kappa_lambda_j)_+^p,
// with lambda_bar = c^{1-p} lambda and eps = lambda_bar^{-1/2}. The constant
// c uses the measured radius and cut level of vortex 0:
//   c = 2 pi |phi'(1)| / (kappa (lambda r^2)^{1/(p-1)}) * 4 pi / ln lambda  (p != 1),
//   c = 4 pi / ln lambda                                                   (p = 1).
struct Rescaling {
  double c = 1.0;
  double lambda_bar = 0.0;
  double eps = 0.0;
  std::vector<double> kappa_lambda;  // c kappa-tilde_j
};
Rescaling rescale_solution(const StreamSolution& sol, const std::vector<CoreMeasurement>& cores,
                           const RadialProfile& profile);

struct AnsatzResidual {
  double max_norm = 0.0;       // max over unknowns of |c psi - U|
  double core_norm = 0.0;      // same, restricted to |y - x_j| <= 2 s_j
  double max_core_radius = 0.0;
  double scaled = 0.0;         // max_norm |ln eps| / max s_j
};

// c psi - U on the grid for a given ansatz field.
AnsatzResidual residual_against_field(const StreamSolution& sol, double c, const AnsatzField& field);

struct AnsatzComparison {
  Rescaling scaling;
  AnsatzParams params;
  AnsatzResidual residual;
};

// Rescales the solution, assembles the ansatz at the measured peaks with
// cut levels kappa_lambda_j, and compares.
AnsatzComparison residual_against_ansatz(const GreenEvaluator& ev, const StreamSolution& sol,
                                         const std::vector<CoreMeasurement>& cores, const RadialProfile& profile);

// Velocity v = (d2 psi, -d1 psi) by central differences, the pressure
// P = lambda / (p+1) sum_j 1_{B_j} (psi - kappa-tilde_j)_+^{p+1} - |grad psi|^2 / 2
// and the discrete divergence of v. Values on the outer frame are zero.
struct FlowFields {
  Eigen::VectorXd vx, vy, pressure, divergence;
  double max_divergence = 0.0;  // over nodes whose stencils lie inside the domain
  double max_speed = 0.0;
};
FlowFields recover_velocity_pressure(const StreamSolution& sol, Exec exec = Exec::Parallel);

// Bernoulli check on the irrotational region (farther than core_factor * r_j
// from each core and boundary_margin * diameter from the boundary). The
// pressure is recovered from steady momentum, grad P = -(v . grad) v, as the
// least-squares potential of trapezoidal edge differences with one node fixed
// per connected component; B = P + |v|^2 / 2 should be constant on each.
struct BernoulliComponent {
  int nodes = 0;
  double mean = 0.0;
  double stdev = 0.0;
};
struct BernoulliReport {
  std::vector<BernoulliComponent> components;
  double max_stdev = 0.0;
  double velocity_scale = 0.0;  // max |v|^2 / 2 on the region
};
struct BernoulliOptions {
  double core_factor = 1.5;
  double boundary_margin = 0.05;
  int min_component_nodes = 16;
};
BernoulliReport bernoulli_check(const StreamSolution& sol, const std::vector<CoreMeasurement>& cores,
                                const BernoulliOptions& options = {}, Exec exec = Exec::Parallel);

// |grad W_k| at the measured peaks against the core size.
struct NecessaryCondition {
  Eigen::VectorXd gradient;
  double grad_norm = 0.0;
  double max_radius = 0.0;
  double ratio = 0.0;  // grad_norm / max_radius
};
NecessaryCondition necessary_condition_check(const GreenEvaluator& ev, const std::vector<CoreMeasurement>& cores,
                                             const std::vector<double>& strengths);

}  // namespace vortexlab
