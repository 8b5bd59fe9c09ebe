// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/green.hpp"

#include <vector>

namespace vortexlab {

struct VortexConfig {
  std::vector<Vec2> points;
  std::vector<double> strengths;
  int k() const { return static_cast<int>(points.size()); }
};

// Throws InvalidArgument (size mismatch, kappa <= 0), OutsideDomain or CoincidentVortices.
void validate_config(const GreenEvaluator& ev, const VortexConfig& cfg);

// W = -sum_{i != j} k_i k_j G(x_i, x_j) + sum_i k_i^2 h(x_i)
double kr_value(const GreenEvaluator& ev, const VortexConfig& cfg);

struct KrDerivatives {
  Eigen::VectorXd gradient;  // (x_11, x_12, ..., x_k2)
  Eigen::MatrixXd hessian;
};
KrDerivatives kr_derivatives(const GreenEvaluator& ev, const VortexConfig& cfg);
Eigen::VectorXd kr_gradient(const GreenEvaluator& ev, const VortexConfig& cfg);

enum class CriticalClass { NondegenerateMin, NondegenerateSaddle, NondegenerateMax, Degenerate };
const char* to_string(CriticalClass c);

struct CriticalPointReport {
  std::vector<Vec2> location;
  double grad_norm = 0.0;
  Eigen::VectorXd hessian_eigenvalues;
  CriticalClass classification = CriticalClass::Degenerate;
  int iterations = 0;
};

struct CriticalPointOptions {
  double tol = 1e-10;
  int max_iterations = 200;
  double degeneracy_ratio = 1e-6;  // min|eig| < ratio * max|eig| => degenerate
};

CriticalClass classify_hessian(const Eigen::VectorXd& eigenvalues, double degeneracy_ratio);

// Newton on grad W with Armijo backtracking on |grad W|^2, Levenberg damping
// when steps stall, and backtracking of steps that leave the domain or merge
// vortices. Throws NoConvergence or LeftDomain.
CriticalPointReport find_critical_point(const GreenEvaluator& ev, const VortexConfig& initial,
                                        const CriticalPointOptions& options = {});

struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<Vec2>> states;
  std::vector<double> energy;  // W along the samples
};

// dx_i/dt = -perp_cw(grad_{x_i} W) / k_i by classical RK4. States are stored
// every sample_every steps and at T. Throws LeftDomain or CollisionDetected.
Trajectory integrate_point_vortices(const GreenEvaluator& ev, const VortexConfig& cfg, double T, double dt,
                                    int sample_every = 100);

}  // namespace vortexlab
