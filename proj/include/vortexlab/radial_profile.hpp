// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/core.hpp"

#include <string>
#include <vector>

namespace vortexlab {

enum class ProfileKind { Nonlinear, Eigen };

// Positive radial solution of phi'' + phi'/r + phi^p = 0 on [0, edge) with
// phi(edge) = 0. For p != 1 the edge is 1; for p = 1 the profile is J0 with
// edge at its first zero gamma and phi(0) = 1.
struct RadialProfile {
  double p = 1.0;
  ProfileKind kind = ProfileKind::Eigen;
  std::vector<double> r;     // uniform on [0, edge]
  std::vector<double> phi;
  std::vector<double> dphi;
  double edge_radius = 1.0;
  double dphi_edge = 0.0;    // phi'(edge) < 0
  double phi0 = 1.0;
  double shoot_alpha = 0.0;  // accepted shooting height before rescaling
  double shoot_edge = 0.0;   // its first zero
  int bisection_iterations = 0;
};

// Throws InvalidExponent (p <= 0) or NoConvergence.
RadialProfile solve_radial_profile(double p, double tol = 1e-12);

struct ProfileValue {
  double value;
  double derivative;
};

// phi and phi' on [0, edge] (clamped).
ProfileValue eval_phi(const RadialProfile& prof, double r);
// Glued profile: phi inside, edge |phi'(edge)| ln(edge / r) outside. C1 at the edge.
ProfileValue eval_w(const RadialProfile& prof, double r);

// 2 pi * int_0^edge phi^p r dr by Gauss-Legendre on the stored interpolant.
double profile_mass(const RadialProfile& prof);
// 2 pi * edge * |phi'(edge)|
double profile_flux(const RadialProfile& prof);
// max over grid nodes of |phi'' + phi'/r + phi^p| with three-point stencils,
// divided by max phi^p.
double profile_ode_residual(const RadialProfile& prof);

// Power series of J0 and J1 (accurate for |x| <= 10).
double bessel_j0_series(double x);
double bessel_j1_series(double x);
// First positive zero of J0 by bisection on the series.
double bessel_j0_first_zero();

}  // namespace vortexlab
