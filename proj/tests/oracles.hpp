// SPDX-License-Identifier: Apache-2.0
// Test-only reference implementations, written independently of the library.
#pragma once

#include <Eigen/Dense>

#include <functional>

namespace oracle {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Unit disk Green's function G(x, y) = (1/4 pi) ln((1 - 2 x.y + |x|^2 |y|^2) / |x - y|^2).
double disk_green(const Vec2& x, const Vec2& y);
// Regular part H = (1/2 pi) ln(1/|x - y|) - G, and the Robin function h(x) = -(1/2 pi) ln(1 - |x|^2).
double disk_regular(const Vec2& x, const Vec2& y);
double disk_robin(const Vec2& x);

// Fourth-order central differences.
Vec2 fd_gradient(const std::function<double(const Vec2&)>& f, const Vec2& x, double step = 1e-4);
Mat2 fd_hessian(const std::function<double(const Vec2&)>& f, const Vec2& x, double step = 1e-3);
// (a, b) = d/dx_a d/dy_b of g(x, y).
Mat2 fd_mixed(const std::function<double(const Vec2&, const Vec2&)>& g, const Vec2& x, const Vec2& y,
              double step = 1e-3);

// Ground state of phi'' + phi'/r + phi^p = 0 on the unit ball with phi(1) = 0,
// by RK4 shooting from phi(0) = 1 and the scaling symmetry (p != 1).
struct LaneEmden {
  double phi0 = 0.0;     // phi(0) after rescaling to the unit ball
  double dphi_edge = 0.0;
  double first_zero = 0.0;  // zero of the unscaled solution with phi(0) = 1
};
LaneEmden lane_emden(double p);

// Centered single vortex in the unit disk with the core inside the mask:
// exact cut level, core radius and peak value of -Lap psi = lambda (psi - k)_+^p.
struct RadialVortex {
  double cut_level = 0.0;
  double core_radius = 0.0;
  double peak = 0.0;
};
RadialVortex centered_disk_vortex(double lambda, double p, double kappa);

}  // namespace oracle
