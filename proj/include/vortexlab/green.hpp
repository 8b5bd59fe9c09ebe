// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/core.hpp"
#include "vortexlab/domain.hpp"

#include <memory>
#include <string>
#include <vector>

namespace vortexlab {

enum class GreenMethod { ImagesAnalytic, Mfs };

const char* to_string(GreenMethod method);

struct GreenOptions {
  double tol = 1e-8;           // boundary residual target for the MFS fit
  bool force_mfs = false;      // use MFS even where a closed form exists
  int max_sources = 1024;
  double coincidence_eps = 1e-12;
};

struct GreenDiagnostics {
  GreenMethod method = GreenMethod::ImagesAnalytic;
  int n_sources = 0;
  double fit_residual = 0.0;
  double fd_step = 0.0;  // 0 when derivatives are closed form
};

// Green's function of -Laplace with zero Dirichlet data,
//   G(x, y) = (1/2pi) ln(1/|x - y|) - H(x, y),
// and the Robin function h(x) = H(x, x). Immutable and shareable.
//
// Slot convention: the first argument is the pole. For the MFS path the
// regular part is fitted as a harmonic function of the second argument.
class GreenEvaluator {
 public:
  static GreenEvaluator build(const Domain& domain, const GreenOptions& options = {});

  const Domain& domain() const;
  GreenDiagnostics diagnostics() const;
  GreenMethod method() const { return diagnostics().method; }
  double fit_residual() const { return diagnostics().fit_residual; }
  const std::vector<Vec2>& charge_points() const;

  // Checked evaluation: interior points, |x - y| above the coincidence epsilon.
  double green(const Vec2& x, const Vec2& y) const;
  // Checked Robin derivatives; x must keep 0.05 * diameter from the boundary.
  double robin(const Vec2& x) const;
  Vec2 robin_gradient(const Vec2& x) const;
  Mat2 robin_hessian(const Vec2& x) const;

  // Unchecked kernels. R(x, y) is the regular part with pole x. Field-slot
  // derivatives are analytic; pole-slot derivatives on the MFS path use
  // Richardson-extrapolated central differences with step fd_step.
  double regular(const Vec2& x, const Vec2& y) const;
  double green_raw(const Vec2& x, const Vec2& y) const;
  Vec2 green_grad_pole(const Vec2& x, const Vec2& y) const;   // d/dx G(x, y)
  Vec2 green_grad_field(const Vec2& x, const Vec2& y) const;  // d/dy G(x, y)
  Mat2 green_hess_pole(const Vec2& x, const Vec2& y) const;   // d2/dx2
  Mat2 green_hess_field(const Vec2& x, const Vec2& y) const;  // d2/dy2
  Mat2 green_hess_mixed(const Vec2& x, const Vec2& y) const;  // (a, b) = d/dx_a d/dy_b
  double robin_raw(const Vec2& x) const;
  Vec2 robin_gradient_raw(const Vec2& x) const;
  Mat2 robin_hessian_raw(const Vec2& x) const;

  struct Impl;

  // y -> R(x, y) with the per-pole work done once.
  class RegularSampler {
   public:
    double operator()(const Vec2& y) const;
    Vec2 gradient(const Vec2& y) const;  // d/dy R(pole, y)

   private:
    friend class GreenEvaluator;
    std::shared_ptr<const Impl> impl_;
    Vec2 pole_;
    Eigen::VectorXd coeffs_;
  };
  RegularSampler regular_sampler(const Vec2& pole) const;

 private:
  std::shared_ptr<const Impl> impl_;
};

// Closed-form unit disk pieces (also used as oracles).
double disk_regular(const Vec2& x, const Vec2& y);
double disk_robin(const Vec2& x);

}  // namespace vortexlab
