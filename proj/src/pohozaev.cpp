// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/pohozaev.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vortexlab {

void validate_ball(const FieldOnBall& f) {
  if (!(f.tau > 0.0)) fail(ErrorCode::InvalidArgument, "ball radius must be positive");
  if (f.nodes < 64) fail(ErrorCode::InvalidArgument, "circle quadrature needs at least 64 nodes");
  if (!f.value || !f.gradient) fail(ErrorCode::InvalidArgument, "field needs a value and a gradient");
  if (f.domain && !(f.domain->contains(f.center) && f.domain->boundary_distance(f.center) > f.tau))
    fail(ErrorCode::BallExitsDomain, "ball is not contained in the domain");
}

namespace {

// Trapezoid rule on the circle: sum over nodes of g(x, nu) times the arc weight.
template <class Fn>
double circle_integral(const Vec2& c, double tau, int nodes, const Fn& g) {
  double s = 0.0;
  for (int a = 0; a < nodes; ++a) {
    const double t = kTwoPi * a / nodes;
    const Vec2 nu(std::cos(t), std::sin(t));
    s += g(Vec2(c + tau * nu), nu);
  }
  return s * kTwoPi * tau / nodes;
}

}  // namespace

double pohozaev_residual(const FieldOnBall& field, const PohozaevSource& rhs, int i) {
  validate_ball(field);
  if (i != 0 && i != 1) fail(ErrorCode::InvalidArgument, "direction must be 0 or 1");
  const double lhs = circle_integral(field.center, field.tau, field.nodes, [&](const Vec2& x, const Vec2& nu) {
    const Vec2 g = field.gradient(x);
    return -g.dot(nu) * g[i] + 0.5 * g.squaredNorm() * nu[i];
  });
  double right = 0.0;
  if (rhs.F)
    right += circle_integral(field.center, field.tau, field.nodes,
                             [&](const Vec2& x, const Vec2& nu) { return rhs.F(x, field.value(x)) * nu[i]; });
  if (rhs.F_x) {
    auto ring = [&](double r) {
      if (r <= 0.0) return 0.0;
      return circle_integral(field.center, r, field.nodes,
                             [&](const Vec2& x, const Vec2&) { return rhs.F_x(x, field.value(x), i); });
    };
    right -= boost::math::quadrature::gauss<double, 30>::integrate(ring, 0.0, field.tau);
  }
  return lhs - right;
}

double q_form(const FieldOnBall& u, const FieldOnBall& v, int i) {
  validate_ball(u);
  validate_ball(v);
  if (i != 0 && i != 1) fail(ErrorCode::InvalidArgument, "direction must be 0 or 1");
  if ((u.center - v.center).norm() != 0.0 || u.tau != v.tau)
    fail(ErrorCode::InvalidArgument, "q_form: fields must share center and radius");
  const int nodes = std::max(u.nodes, v.nodes);
  return circle_integral(u.center, u.tau, nodes, [&](const Vec2& x, const Vec2& nu) {
    const Vec2 gu = u.gradient(x), gv = v.gradient(x);
    return -gv.dot(nu) * gu[i] - gu.dot(nu) * gv[i] + gu.dot(gv) * nu[i];
  });
}

FieldOnBall green_field(const GreenEvaluator& ev, const Vec2& pole, const Vec2& center, double tau, int nodes) {
  FieldOnBall f;
  f.value = [&ev, pole](const Vec2& x) { return ev.green_raw(pole, x); };
  f.gradient = [&ev, pole](const Vec2& x) { return ev.green_grad_field(pole, x); };
  f.center = center;
  f.tau = tau;
  f.nodes = nodes;
  f.domain = &ev.domain();
  return f;
}

FieldOnBall green_pole_derivative_field(const GreenEvaluator& ev, const Vec2& pole, int j, const Vec2& center,
                                        double tau, int nodes) {
  FieldOnBall f;
  f.value = [&ev, pole, j](const Vec2& x) { return ev.green_grad_pole(pole, x)[j]; };
  f.gradient = [&ev, pole, j](const Vec2& x) {
    const Mat2 m = ev.green_hess_mixed(pole, x);
    return Vec2(m(j, 0), m(j, 1));
  };
  f.center = center;
  f.tau = tau;
  f.nodes = nodes;
  f.domain = &ev.domain();
  return f;
}

FieldOnBall stream_field(const StreamSolution& sol, const Vec2& center, double tau, int nodes) {
  FieldOnBall f;
  const GridSystem* grid = sol.grid.get();
  const Eigen::VectorXd* psi = &sol.psi;
  f.value = [grid, psi](const Vec2& x) { return grid->interpolate(*psi, x); };
  f.gradient = [grid, psi](const Vec2& x) { return grid->interpolate_gradient(*psi, x); };
  f.center = center;
  f.tau = tau;
  f.nodes = nodes;
  f.domain = &grid->domain();
  return f;
}

double stream_pohozaev_residual(const StreamSolution& sol, const std::vector<CoreMeasurement>& cores, int j, int i) {
  const Domain& dom = sol.grid->domain();
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < cores.size(); ++a) {
    t = std::min(t, dom.boundary_distance(cores[a].peak));
    for (std::size_t b = a + 1; b < cores.size(); ++b) t = std::min(t, (cores[a].peak - cores[b].peak).norm());
  }
  const double tau = 0.25 * t;
  if (tau <= cores.at(j).radius) fail(ErrorCode::InvalidArgument, "pohozaev circle does not clear the core");
  return pohozaev_residual(stream_field(sol, cores[j].peak, tau), {}, i);
}

std::vector<GreenIdentityRow> verify_green_identities(const GreenEvaluator& ev, const Vec2& x0, const Vec2& x1,
                                                      double tau, int nodes) {
  const Domain& dom = ev.domain();
  if ((x0 - x1).norm() == 0.0) fail(ErrorCode::CoincidentPoints, "x0 and x1 coincide");
  if (!dom.contains(x0) || !dom.contains(x1)) fail(ErrorCode::OutsideDomain, "identity points must be interior");
  if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "tau must be positive");
  if (dom.boundary_distance(x0) <= tau) fail(ErrorCode::BallExitsDomain, "B_tau(x0) leaves the domain");
  if ((x1 - x0).norm() <= tau) fail(ErrorCode::InvalidArgument, "x1 must lie outside the closed ball");

  const Mat2 hess_h = ev.robin_hessian(x0);
  const Mat2 mixed = ev.green_hess_mixed(x1, x0);  // (a, b) = d/dpole_a d/dfield_b at (x1, x0)
  const Mat2 field = ev.green_hess_field(x1, x0);
  const FieldOnBall g0 = green_field(ev, x0, x0, tau, nodes);
  const FieldOnBall g1 = green_field(ev, x1, x0, tau, nodes);

  std::vector<GreenIdentityRow> rows;
  auto add = [&](const char* name, int i, int j, double q, double claimed) {
    rows.push_back({name, i, j, tau, q, claimed, std::abs(q - claimed)});
  };
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const FieldOnBall d0 = green_pole_derivative_field(ev, x0, j, x0, tau, nodes);
      const FieldOnBall d1 = green_pole_derivative_field(ev, x1, j, x0, tau, nodes);
      const double q_self = q_form(g0, d0, i);
      const double q_pole = q_form(g1, d0, i);
      const double q_dipole = q_form(g0, d1, i);
      const double Dd = mixed(j, i);  // D_{x_i} d_j G(x1, x0)
      const double DD = field(i, j);  // D_{x_i x_j} G(x1, x0)
      add("self_pair", i, j, q_self, -0.5 * hess_h(i, j));
      add("far_pole_pair", i, j, q_pole, 0.5 * Dd + 0.5 * DD);
      add("far_dipole_pair", i, j, q_dipole, 0.5 * Dd);
      add("far_pole_pair_corrected", i, j, q_pole, DD);
      add("far_dipole_pair_corrected", i, j, q_dipole, Dd);
    }
  return rows;
}

double q_tau_independence(const GreenEvaluator& ev, const Vec2& x0, const Vec2& x1, double tau, int nodes) {
  const auto a = verify_green_identities(ev, x0, x1, tau, nodes);
  const auto b = verify_green_identities(ev, x0, x1, 0.5 * tau, nodes);
  double m = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) m = std::max(m, std::abs(a[r].q - b[r].q));
  return m;
}

}  // namespace vortexlab
