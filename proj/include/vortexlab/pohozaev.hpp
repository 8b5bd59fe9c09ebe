// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/cores.hpp"
#include "vortexlab/green.hpp"
#include "vortexlab/stream_solver.hpp"

#include <functional>
#include <string>
#include <vector>

namespace vortexlab {

// A field with gradient sampled on the circle |x - center| = tau and, for
// ball integrals, inside it.
struct FieldOnBall {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;
  Vec2 center = Vec2::Zero();
  double tau = 0.0;
  int nodes = 256;                 // trapezoid nodes on the circle, >= 64
  const Domain* domain = nullptr;  // when set, the ball must lie inside it
};

// Throws InvalidArgument (tau <= 0, nodes < 64) or BallExitsDomain.
void validate_ball(const FieldOnBall& f);

// Source data for -Lap u = f(x, u): F(x, t) = int_0^t f(x, s) ds and its
// explicit x_i derivative. Empty callables mean zero.
struct PohozaevSource {
  std::function<double(const Vec2&, double)> F;
  std::function<double(const Vec2&, double, int)> F_x;
};

// LHS - RHS of the local Pohozaev identity in direction i (0 or 1), with
// the ball integral on a polar grid (30-point Gauss-Legendre in r, the
// circle nodes in angle):
//   -int_{dB} du/dnu du/dx_i + 1/2 int_{dB} |grad u|^2 nu_i
//   - ( int_{dB} F(x, u) nu_i - int_B F_{x_i}(x, u) ).
double pohozaev_residual(const FieldOnBall& field, const PohozaevSource& rhs, int i);

// Quadratic form on dB_tau(center):
//   Q(u, v) = -int dv/dnu du/dx_i - int du/dnu dv/dx_i + int <grad u, grad v> nu_i.
// Throws InvalidArgument when the balls differ.
double q_form(const FieldOnBall& u, const FieldOnBall& v, int i);

// u = G(pole, .), and v = d/dpole_j G(pole, .).
FieldOnBall green_field(const GreenEvaluator& ev, const Vec2& pole, const Vec2& center, double tau, int nodes = 256);
FieldOnBall green_pole_derivative_field(const GreenEvaluator& ev, const Vec2& pole, int j, const Vec2& center,
                                        double tau, int nodes = 256);

// Bicubic interpolant of a converged stream function.
FieldOnBall stream_field(const StreamSolution& sol, const Vec2& center, double tau, int nodes = 256);

// Pohozaev residual of the stream function on the circle of radius
// tau_lambda / 4 about core j, tau_lambda being the smallest peak separation
// or peak-to-boundary distance. The source term vanishes on that circle and
// has no explicit x dependence inside it, so only boundary terms remain.
// Throws InvalidArgument when the circle does not clear the core.
double stream_pohozaev_residual(const StreamSolution& sol, const std::vector<CoreMeasurement>& cores, int j, int i);

// Rows of the Green's function identities for Q on dB_tau(x0), with x1
// outside the closed ball:
//   self_pair:                 Q(G(x0,.), d_j G(x0,.)) = -1/2 d_ij h(x0)
//   far_pole_pair:             Q(G(x1,.), d_j G(x0,.)) = 1/2 D_i d_j G(x1,x0) + 1/2 D_ij G(x1,x0)
//   far_dipole_pair:           Q(G(x0,.), d_j G(x1,.)) = 1/2 D_i d_j G(x1,x0)
//   far_pole_pair_corrected:   Q(G(x1,.), d_j G(x0,.)) = D_ij G(x1,x0)
//   far_dipole_pair_corrected: Q(G(x0,.), d_j G(x1,.)) = D_i d_j G(x1,x0)
// d acts on the pole slot, D on the field slot. The uncorrected rows are the
// identities as commonly stated; the corrected ones follow from
// Q(S(. - y), phi) = d_i phi(y) for the logarithmic kernel S and harmonic phi.
struct GreenIdentityRow {
  std::string identity;
  int i = 0;
  int j = 0;
  double tau = 0.0;
  double q = 0.0;
  double claimed = 0.0;
  double residual = 0.0;  // |q - claimed|
};

// Throws CoincidentPoints, OutsideDomain, BallExitsDomain or InvalidArgument.
std::vector<GreenIdentityRow> verify_green_identities(const GreenEvaluator& ev, const Vec2& x0, const Vec2& x1,
                                                      double tau, int nodes = 256);

// max over the three pairs and i, j of |Q at tau - Q at tau / 2|.
double q_tau_independence(const GreenEvaluator& ev, const Vec2& x0, const Vec2& x1, double tau, int nodes = 256);

}  // namespace vortexlab
