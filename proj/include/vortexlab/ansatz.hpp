// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/green.hpp"
#include "vortexlab/radial_profile.hpp"

#include <memory>
#include <vector>

namespace vortexlab {

// Parameters of the multi-vortex approximate solution
//   U(y) = sum_j PW_j(y),  PW_j = W_j(y - x_j) - a_j / ln(R / s_j) * g(y, x_j),
// with g(y, x) = ln R + 2 pi H(y, x). W_j is the truncated radial core of
// height a_j and core radius s_j; for p = 1 the core radius is gamma * eps.
struct AnsatzParams {
  double eps = 0.0;
  double R = 0.0;
  std::vector<Vec2> centers;       // x_j
  std::vector<Vec2> targets;       // prescribed maximum points z_j
  std::vector<double> amplitudes;  // a_j
  std::vector<double> core_radii;  // s_j
  std::vector<double> cut_levels;  // kappa_j supplied by the caller
  std::shared_ptr<const RadialProfile> profile;
  int iterations = 0;
  double residual = 0.0;  // joint residual of the amplitude, radius and centering equations

  int k() const { return static_cast<int>(centers.size()); }
  double p() const { return profile->p; }
};

// Small root s in (0, R/e) of (eps/s)^(2/(p-1)) phi'(1) = a / ln(s/R).
// Throws InvalidExponent for p = 1 and NoRoot when no root exists.
double solve_core_radius(double eps, double a, double R, const RadialProfile& profile);

// Residual of the core-radius equation, (eps/s)^q |phi'(1)| - a / ln(R/s),
// scaled by a / ln(R/s).
double core_radius_residual(double eps, double a, double R, double s, const RadialProfile& profile);

// s / [eps (phi'(1) ln eps / a)^((p-1)/2)], the ratio to the leading-order expansion.
double core_radius_expansion_ratio(double eps, double a, double s, const RadialProfile& profile);

struct CoreValue {
  double value;
  double radial_derivative;
};

// Radial core W_{eps,a}(r) of vortex j (truncated profile inside s_j, logarithm outside).
CoreValue core_profile_radial(const AnsatzParams& params, int j, double r);
double eval_core_profile(const AnsatzParams& params, int j, const Vec2& y);

// PW_j(y). Throws OutsideDomain for y outside the closed domain.
double project_profile(const GreenEvaluator& ev, const AnsatzParams& params, int j, const Vec2& y);

// Immutable evaluator of U and its gradient. Per-center regular-part fits are
// computed once at construction.
class AnsatzField {
 public:
  AnsatzField(GreenEvaluator ev, AnsatzParams params);
  const AnsatzParams& params() const { return params_; }
  const GreenEvaluator& evaluator() const { return ev_; }
  double value(const Vec2& y) const;
  Vec2 gradient(const Vec2& y) const;
  // Single-vortex pieces.
  double projected(int j, const Vec2& y) const;
  Vec2 projected_gradient(int j, const Vec2& y) const;
  // a_j / (s_j ln(R / s_j)), the slope of W_j at its core edge.
  double gradient_scale(int j) const;

 private:
  GreenEvaluator ev_;
  AnsatzParams params_;
  std::vector<GreenEvaluator::RegularSampler> samplers_;
};

struct AnsatzOptions {
  double tol = 1e-10;
  int max_iterations = 200;
  double center_damping = 0.5;
};

// Solves the amplitude equations, the core-radius equation and the centering
// condition grad U(z_j) = 0 jointly by fixed-point iteration. The amplitude
// equations read
//   a_i = kappa_i + a_i g(x_i, x_i) / ln(R/s_i) - sum_{j != i} a_j Gbar(x_i, x_j) / ln(R/s_i),
// with Gbar = 2 pi G. R defaults to 2 * diameter.
// Throws NoConvergence, CoreOverlap, NoRoot or OutsideDomain.
AnsatzParams assemble_ansatz(const GreenEvaluator& ev, double eps, const std::vector<double>& cut_levels,
                             const std::vector<Vec2>& initial_centers, std::shared_ptr<const RadialProfile> profile,
                             const AnsatzOptions& options = {});

}  // namespace vortexlab
