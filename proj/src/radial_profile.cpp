// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/radial_profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace vortexlab {

namespace {

constexpr int kIntervals = 8000;

using State = std::array<double, 2>;  // (phi, phi')

State rhs(double p, double r, const State& y) {
  const double f = std::pow(std::max(y[0], 0.0), p);
  return {y[1], -f - y[1] / r};
}

// One Runge-Kutta-Fehlberg 4(5) step; returns the fifth-order state and the
// embedded error estimate.
State rkf_step(double p, double r, const State& y, double h, double* err) {
  auto add = [](const State& a, double c1, const State& k1, double c2 = 0, const State& k2 = {},
                double c3 = 0, const State& k3 = {}, double c4 = 0, const State& k4 = {}, double c5 = 0,
                const State& k5 = {}) {
    State o;
    for (int i = 0; i < 2; ++i) o[i] = a[i] + c1 * k1[i] + c2 * k2[i] + c3 * k3[i] + c4 * k4[i] + c5 * k5[i];
    return o;
  };
  const State k1 = rhs(p, r, y);
  const State k2 = rhs(p, r + h / 4, add(y, h / 4, k1));
  const State k3 = rhs(p, r + 3 * h / 8, add(y, 3 * h / 32, k1, 9 * h / 32, k2));
  const State k4 = rhs(p, r + 12 * h / 13, add(y, 1932 * h / 2197, k1, -7200 * h / 2197, k2, 7296 * h / 2197, k3));
  const State k5 = rhs(p, r + h, add(y, 439 * h / 216, k1, -8 * h, k2, 3680 * h / 513, k3, -845 * h / 4104, k4));
  const State k6 = rhs(p, r + h / 2,
                       add(y, -8 * h / 27, k1, 2 * h, k2, -3544 * h / 2565, k3, 1859 * h / 4104, k4, -11 * h / 40, k5));
  State y5, y4;
  for (int i = 0; i < 2; ++i) {
    y5[i] = y[i] + h * (16.0 / 135 * k1[i] + 6656.0 / 12825 * k3[i] + 28561.0 / 56430 * k4[i] - 9.0 / 50 * k5[i] +
                        2.0 / 55 * k6[i]);
    y4[i] = y[i] + h * (25.0 / 216 * k1[i] + 1408.0 / 2565 * k3[i] + 2197.0 / 4104 * k4[i] - 1.0 / 5 * k5[i]);
  }
  *err = std::max(std::abs(y5[0] - y4[0]), std::abs(y5[1] - y4[1]));
  return y5;
}

struct ShotResult {
  double edge = 0.0;
  double dphi_edge = 0.0;
};

// Integrates from the series start to the first zero of phi. When nodes is
// non-empty the state is recorded at each node (ascending, last node is
// replaced by the located zero).
ShotResult shoot(double p, double alpha, double ode_tol, const std::vector<double>* nodes,
                 std::vector<State>* states) {
  // Series start phi = a - a^p r^2/4 + p a^(2p-1) r^4/64.
  const double scale = std::pow(alpha, -(p - 1.0) / 2.0);  // natural length
  double r = 1e-4 * scale;
  if (nodes && nodes->size() > 1) r = std::min(r, 0.5 * (*nodes)[1]);
  const double ap = std::pow(alpha, p);
  State y{alpha - ap * r * r / 4 + p * std::pow(alpha, 2 * p - 1) * std::pow(r, 4) / 64,
          -ap * r / 2 + p * std::pow(alpha, 2 * p - 1) * std::pow(r, 3) / 16};
  std::size_t next = 1;
  if (states) {
    states->assign(nodes->size(), State{0.0, 0.0});
    (*states)[0] = {alpha, 0.0};
  }
  const double atol = ode_tol * alpha;
  double h = 1e-3 * scale;
  const double rmax = 1e3 * scale;
  for (int step = 0; step < 10000000; ++step) {
    if (r > rmax) fail(ErrorCode::NoConvergence, "shooting: no zero found");
    double hs = h;
    bool to_node = false;
    if (nodes && next + 1 < nodes->size() && r + hs >= (*nodes)[next]) {
      hs = (*nodes)[next] - r;
      to_node = true;
    }
    double err = 0.0;
    const State yn = rkf_step(p, r, y, hs, &err);
    const double tol_here = atol + ode_tol * std::abs(y[1]) * hs;
    if (err > tol_here && hs > 1e-14 * scale) {
      h = hs * std::max(0.1, 0.9 * std::pow(tol_here / err, 0.2));
      continue;
    }
    if (yn[0] <= 0.0) {
      // Event: locate phi = 0 inside the step by bisection on the step length.
      double lo = 0.0, hi = hs;
      State ylo = y, yhi = yn;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * (r + hs); ++it) {
        const double mid = 0.5 * (lo + hi);
        double e2 = 0.0;
        const State ym = rkf_step(p, r, y, mid, &e2);
        if (ym[0] > 0.0) {
          lo = mid;
          ylo = ym;
        } else {
          hi = mid;
          yhi = ym;
        }
      }
      // Linear interpolation of phi' at the zero between the bracketing states.
      const double w = ylo[0] / (ylo[0] - yhi[0]);
      const double edge = r + lo + w * (hi - lo);
      const double dedge = ylo[1] + w * (yhi[1] - ylo[1]);
      if (states) states->back() = {0.0, dedge};
      return {edge, dedge};
    }
    r += hs;
    y = yn;
    if (to_node) {
      (*states)[next] = y;
      ++next;
    }
    h = hs * std::min(5.0, 0.9 * std::pow(tol_here / std::max(err, 1e-300), 0.2));
    if (to_node) h = std::max(h, 1e-6 * scale);
  }
  fail(ErrorCode::NoConvergence, "shooting: step limit");
}

}  // namespace

double bessel_j0_series(double x) {
  const double q = -0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_j1_series(double x) {
  const double q = -0.25 * x * x;
  double term = 0.5 * x, sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_j0_first_zero() {
  double lo = 2.0, hi = 3.0;  // J0(2) > 0 > J0(3)
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bessel_j0_series(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RadialProfile solve_radial_profile(double p, double tol) {
  if (!(p > 0.0) || !std::isfinite(p)) fail(ErrorCode::InvalidExponent, "p must be positive");
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be positive");
  RadialProfile prof;
  prof.p = p;
  prof.r.resize(kIntervals + 1);
  prof.phi.resize(kIntervals + 1);
  prof.dphi.resize(kIntervals + 1);

  if (p == 1.0) {
    prof.kind = ProfileKind::Eigen;
    const double g = bessel_j0_first_zero();
    prof.edge_radius = g;
    for (int i = 0; i <= kIntervals; ++i) {
      const double r = g * i / kIntervals;
      prof.r[i] = r;
      prof.phi[i] = i == kIntervals ? 0.0 : bessel_j0_series(r);
      prof.dphi[i] = -bessel_j1_series(r);
    }
    prof.phi0 = 1.0;
    prof.dphi_edge = prof.dphi.back();
    prof.shoot_alpha = 1.0;
    prof.shoot_edge = g;
    return prof;
  }

  prof.kind = ProfileKind::Nonlinear;
  const double ode_tol = std::clamp(1e-2 * tol, 1e-14, 1e-8);
  auto edge_of = [&](double a) { return shoot(p, a, ode_tol, nullptr, nullptr).edge; };

  // Bracket alpha with edge(alpha) - 1 changing sign; seed [0.1, 100].
  double lo = 0.1, hi = 100.0;
  double flo = edge_of(lo) - 1.0, fhi = edge_of(hi) - 1.0;
  for (int ex = 0; ex < 40 && (flo > 0) == (fhi > 0); ++ex) {
    const bool need_smaller_edge = flo > 0;  // both edges above 1 ...
    const bool decreasing = p > 1.0;         // edge ~ alpha^{-(p-1)/2}
    if (need_smaller_edge == decreasing) {
      hi *= 10.0;
      fhi = edge_of(hi) - 1.0;
    } else {
      lo /= 10.0;
      flo = edge_of(lo) - 1.0;
    }
  }
  if ((flo > 0) == (fhi > 0)) fail(ErrorCode::NoConvergence, "could not bracket shooting height");

  int iters = 0;
  double alpha = std::sqrt(lo * hi);
  double fa = edge_of(alpha) - 1.0;
  while (std::abs(fa) > tol && iters < 200) {
    ((fa > 0) == (flo > 0) ? lo : hi) = alpha;
    if ((fa > 0) == (flo > 0)) flo = fa;
    alpha = std::sqrt(lo * hi);
    fa = edge_of(alpha) - 1.0;
    ++iters;
  }
  if (std::abs(fa) > tol) fail(ErrorCode::NoConvergence, "shooting bisection did not reach tol");

  // Record the accepted shot on the scaled node set, then rescale exactly:
  // phi(r) = c phi_alpha(R r), c = R^{2/(p-1)}.
  const double R = fa + 1.0;
  std::vector<double> nodes(kIntervals + 1);
  for (int i = 0; i <= kIntervals; ++i) nodes[i] = R * i / kIntervals;
  std::vector<State> states;
  const ShotResult shot = shoot(p, alpha, ode_tol, &nodes, &states);
  const double Rexact = shot.edge;
  const double c = std::pow(Rexact, 2.0 / (p - 1.0));
  for (int i = 0; i <= kIntervals; ++i) {
    prof.r[i] = static_cast<double>(i) / kIntervals;
    prof.phi[i] = c * states[i][0];
    prof.dphi[i] = c * Rexact * states[i][1];
  }
  prof.phi.back() = 0.0;
  prof.edge_radius = 1.0;
  prof.dphi_edge = prof.dphi.back();
  prof.phi0 = prof.phi[0];
  prof.shoot_alpha = alpha;
  prof.shoot_edge = Rexact;
  prof.bisection_iterations = iters;
  return prof;
}

namespace {

double second_derivative(const RadialProfile& prof, double r, double phi, double dphi) {
  const double f = std::pow(std::max(phi, 0.0), prof.p);
  if (r == 0.0) return -0.5 * f;
  return -f - dphi / r;
}

}  // namespace

ProfileValue eval_phi(const RadialProfile& prof, double r) {
  r = std::clamp(r, 0.0, prof.edge_radius);
  if (prof.kind == ProfileKind::Eigen) {
    if (r == prof.edge_radius) return {0.0, prof.dphi_edge};
    return {bessel_j0_series(r), -bessel_j1_series(r)};
  }
  const int n = static_cast<int>(prof.r.size()) - 1;
  const double h = prof.edge_radius / n;
  int i = std::min(static_cast<int>(r / h), n - 1);
  const double r0 = prof.r[i], r1 = prof.r[i + 1];
  const double t = (r - r0) / h;
  const double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
  const double h01 = -2 * t * t * t + 3 * t * t, h11 = t * t * t - t * t;
  const double v = h00 * prof.phi[i] + h10 * h * prof.dphi[i] + h01 * prof.phi[i + 1] + h11 * h * prof.dphi[i + 1];
  const double s0 = second_derivative(prof, r0, prof.phi[i], prof.dphi[i]);
  const double s1 = second_derivative(prof, r1, prof.phi[i + 1], prof.dphi[i + 1]);
  const double d = h00 * prof.dphi[i] + h10 * h * s0 + h01 * prof.dphi[i + 1] + h11 * h * s1;
  return {v, d};
}

ProfileValue eval_w(const RadialProfile& prof, double r) {
  if (r < 0.0) r = 0.0;
  if (r <= prof.edge_radius) return eval_phi(prof, r);
  const double flux = prof.edge_radius * std::abs(prof.dphi_edge);
  return {flux * std::log(prof.edge_radius / r), -flux / r};
}

double profile_flux(const RadialProfile& prof) { return kTwoPi * prof.edge_radius * std::abs(prof.dphi_edge); }

double profile_mass(const RadialProfile& prof) {
  static constexpr double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                  0.9061798459386640};
  static constexpr double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                  0.2369268850561891};
  const int n = static_cast<int>(prof.r.size()) - 1;
  const double h = prof.edge_radius / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double mid = prof.r[i] + 0.5 * h;
    double part = 0.0;
    for (int q = 0; q < 5; ++q) {
      const double r = mid + 0.5 * h * x[q];
      part += w[q] * r * std::pow(std::max(eval_phi(prof, r).value, 0.0), prof.p);
    }
    sum += 0.5 * h * part;
  }
  return kTwoPi * sum;
}

double profile_ode_residual(const RadialProfile& prof) {
  const int n = static_cast<int>(prof.r.size()) - 1;
  const double h = prof.edge_radius / n;
  const auto& f = prof.phi;
  const double fmax = std::pow(prof.phi0, prof.p);
  double worst = 0.0;
  // r = 0 with even extension: phi'' + phi'/r -> 2 phi''(0).
  worst = std::abs(4.0 * (f[1] - f[0]) / (h * h) + std::pow(f[0], prof.p));
  for (int i = 1; i < n; ++i) {
    const double d2 = (f[i + 1] - 2 * f[i] + f[i - 1]) / (h * h);
    const double d1 = (f[i + 1] - f[i - 1]) / (2 * h);
    worst = std::max(worst, std::abs(d2 + d1 / prof.r[i] + std::pow(std::max(f[i], 0.0), prof.p)));
  }
  return worst / fmax;
}

}  // namespace vortexlab
