// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/ansatz.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace vortexlab {

namespace {

bool is_linear(const RadialProfile& prof) { return prof.kind == ProfileKind::Eigen; }

// Log-space form of the core-radius equation in t = ln s.
double core_equation_log(double eps, double a, double R, double t, const RadialProfile& prof) {
  const double q = 2.0 / (prof.p - 1.0);
  return q * (std::log(eps) - t) + std::log(std::abs(prof.dphi_edge)) - std::log(a) + std::log(std::log(R) - t);
}

// Amplitude multiplying the profile inside the core, and the argument scale.
struct CoreScales {
  double amplitude;
  double length;  // profile argument is r / length
};

CoreScales core_scales(const AnsatzParams& params, int j) {
  const RadialProfile& prof = *params.profile;
  const double a = params.amplitudes[j];
  const double s = params.core_radii[j];
  if (is_linear(prof)) {
    const double g = prof.edge_radius;
    return {a / (g * prof.dphi_edge * std::log(g * params.eps / params.R)), params.eps};
  }
  return {std::pow(params.eps / s, 2.0 / (prof.p - 1.0)), s};
}

Vec2 radial_gradient(double dr, const Vec2& d) {
  const double n = d.norm();
  if (n == 0.0) return Vec2::Zero();
  return dr * d / n;
}

void require_params(const AnsatzParams& params, int j) {
  if (!params.profile) fail(ErrorCode::InvalidArgument, "ansatz: missing profile");
  if (j < 0 || j >= params.k()) fail(ErrorCode::InvalidArgument, "ansatz: vortex index out of range");
}

}  // namespace

double solve_core_radius(double eps, double a, double R, const RadialProfile& profile) {
  if (is_linear(profile)) fail(ErrorCode::InvalidExponent, "core radius equation is not used for p = 1");
  if (!(eps > 0.0) || !(a > 0.0) || !(R > 0.0)) fail(ErrorCode::InvalidArgument, "core radius: eps, a, R must be positive");
  // Scan t = ln s downward from ln(R/e) and keep the smallest sign change.
  const double t_hi = std::log(R) - 1.0;
  const double t_lo = std::min(std::log(eps), t_hi) - 60.0;
  const double step = 0.25;
  auto f = [&](double t) { return core_equation_log(eps, a, R, t, profile); };
  double best_lo = 0.0, best_hi = 0.0;
  bool found = false;
  double t1 = t_hi, f1 = f(t1);
  while (t1 > t_lo) {
    const double t0 = t1 - step;
    const double f0 = f(t0);
    if ((f0 > 0.0) != (f1 > 0.0)) {
      best_lo = t0;
      best_hi = t1;
      found = true;
    }
    t1 = t0;
    f1 = f0;
  }
  if (!found) fail(ErrorCode::NoRoot, "core radius equation has no root in (0, R/e); eps too large");
  std::uintmax_t iters = 200;
  auto tol = [](double lo, double hi) { return std::abs(hi - lo) <= 1e-15 * std::max(1.0, std::abs(lo)); };
  const auto r = boost::math::tools::toms748_solve(f, best_lo, best_hi, tol, iters);
  return std::exp(0.5 * (r.first + r.second));
}

double core_radius_residual(double eps, double a, double R, double s, const RadialProfile& profile) {
  const double q = 2.0 / (profile.p - 1.0);
  const double rhs = a / std::log(R / s);
  return (std::pow(eps / s, q) * std::abs(profile.dphi_edge) - rhs) / rhs;
}

double core_radius_expansion_ratio(double eps, double a, double s, const RadialProfile& profile) {
  return s / (eps * std::pow(profile.dphi_edge * std::log(eps) / a, (profile.p - 1.0) / 2.0));
}

CoreValue core_profile_radial(const AnsatzParams& params, int j, double r) {
  require_params(params, j);
  const double a = params.amplitudes[j];
  const double s = params.core_radii[j];
  if (r <= s) {
    const CoreScales c = core_scales(params, j);
    const ProfileValue v = eval_phi(*params.profile, r / c.length);
    return {a + c.amplitude * v.value, c.amplitude * v.derivative / c.length};
  }
  const double den = std::log(s / params.R);
  return {a * std::log(r / params.R) / den, a / (r * den)};
}

double eval_core_profile(const AnsatzParams& params, int j, const Vec2& y) {
  return core_profile_radial(params, j, (y - params.centers[j]).norm()).value;
}

double project_profile(const GreenEvaluator& ev, const AnsatzParams& params, int j, const Vec2& y) {
  require_params(params, j);
  const Domain& dom = ev.domain();
  if (!dom.contains(y) && dom.boundary_distance(y) > 1e-12 * dom.diameter())
    fail(ErrorCode::OutsideDomain, "project_profile: point outside domain");
  const Vec2& x = params.centers[j];
  const double g = std::log(params.R) + kTwoPi * ev.regular_sampler(x)(y);
  return eval_core_profile(params, j, y) - params.amplitudes[j] / std::log(params.R / params.core_radii[j]) * g;
}

AnsatzField::AnsatzField(GreenEvaluator ev, AnsatzParams params) : ev_(std::move(ev)), params_(std::move(params)) {
  if (!params_.profile) fail(ErrorCode::InvalidArgument, "ansatz: missing profile");
  samplers_.reserve(params_.centers.size());
  for (const Vec2& x : params_.centers) samplers_.push_back(ev_.regular_sampler(x));
}

double AnsatzField::projected(int j, const Vec2& y) const {
  const double g = std::log(params_.R) + kTwoPi * samplers_[j](y);
  return core_profile_radial(params_, j, (y - params_.centers[j]).norm()).value -
         params_.amplitudes[j] / std::log(params_.R / params_.core_radii[j]) * g;
}

Vec2 AnsatzField::projected_gradient(int j, const Vec2& y) const {
  const Vec2 d = y - params_.centers[j];
  const CoreValue c = core_profile_radial(params_, j, d.norm());
  return radial_gradient(c.radial_derivative, d) -
         params_.amplitudes[j] / std::log(params_.R / params_.core_radii[j]) * kTwoPi * samplers_[j].gradient(y);
}

double AnsatzField::value(const Vec2& y) const {
  double u = 0.0;
  for (int j = 0; j < params_.k(); ++j) u += projected(j, y);
  return u;
}

Vec2 AnsatzField::gradient(const Vec2& y) const {
  Vec2 g = Vec2::Zero();
  for (int j = 0; j < params_.k(); ++j) g += projected_gradient(j, y);
  return g;
}

double AnsatzField::gradient_scale(int j) const {
  const double s = params_.core_radii[j];
  return params_.amplitudes[j] / (s * std::log(params_.R / s));
}

namespace {

// Smallest rho in (0, s) with |W_j'(rho)| = target.
double invert_core_slope(const AnsatzParams& params, int j, double target) {
  if (target == 0.0) return 0.0;
  const double s = params.core_radii[j];
  auto f = [&](double rho) { return std::abs(core_profile_radial(params, j, rho).radial_derivative) - target; };
  double hi = 1e-6 * s;
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (hi >= s) {
      if (f(s) < 0.0) fail(ErrorCode::NoConvergence, "ansatz: centering force exceeds the core slope");
      hi = s;
      break;
    }
  }
  std::uintmax_t iters = 200;
  auto tol = [](double lo, double up) { return std::abs(up - lo) <= 1e-15 * std::max(up, 1e-300); };
  const auto r = boost::math::tools::toms748_solve(f, 0.0, hi, -target, f(hi), tol, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

AnsatzParams assemble_ansatz(const GreenEvaluator& ev, double eps, const std::vector<double>& cut_levels,
                             const std::vector<Vec2>& initial_centers, std::shared_ptr<const RadialProfile> profile,
                             const AnsatzOptions& options) {
  if (!profile) fail(ErrorCode::InvalidArgument, "ansatz: missing profile");
  if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "ansatz: eps must be positive");
  const int k = static_cast<int>(initial_centers.size());
  if (k == 0 || static_cast<int>(cut_levels.size()) != k)
    fail(ErrorCode::InvalidArgument, "ansatz: centers and cut levels must have equal nonzero length");
  const Domain& dom = ev.domain();
  for (int j = 0; j < k; ++j) {
    if (!(cut_levels[j] > 0.0)) fail(ErrorCode::InvalidArgument, "ansatz: cut levels must be positive");
    if (!dom.contains(initial_centers[j])) fail(ErrorCode::OutsideDomain, "ansatz: center outside domain");
  }

  AnsatzParams P;
  P.eps = eps;
  P.R = 2.0 * dom.diameter();
  P.centers = initial_centers;
  P.targets = initial_centers;
  P.amplitudes = cut_levels;
  P.cut_levels = cut_levels;
  P.core_radii.assign(k, 0.0);
  P.profile = profile;
  const bool linear = is_linear(*profile);

  auto update_radii = [&]() {
    for (int j = 0; j < k; ++j)
      P.core_radii[j] =
          linear ? profile->edge_radius * eps : solve_core_radius(eps, P.amplitudes[j], P.R, *profile);
  };
  auto check_overlap = [&]() {
    for (int i = 0; i < k; ++i) {
      if (!dom.contains(P.centers[i])) fail(ErrorCode::OutsideDomain, "ansatz: center left the domain");
      for (int j = i + 1; j < k; ++j)
        if ((P.centers[i] - P.centers[j]).norm() <= P.core_radii[i] + P.core_radii[j])
          fail(ErrorCode::CoreOverlap, "ansatz: cores " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
    }
  };

  // Amplitude equations as a linear system M a = kappa for fixed x and s.
  auto amplitude_matrix = [&]() {
    Eigen::MatrixXd M(k, k);
    for (int i = 0; i < k; ++i) {
      const double L = std::log(P.R / P.core_radii[i]);
      for (int j = 0; j < k; ++j) {
        if (i == j)
          M(i, i) = 1.0 - (std::log(P.R) + kTwoPi * ev.robin_raw(P.centers[i])) / L;
        else
          M(i, j) = kTwoPi * ev.green_raw(P.centers[i], P.centers[j]) / L;
      }
    }
    return M;
  };
  const Eigen::Map<const Eigen::VectorXd> kappa(cut_levels.data(), k);

  update_radii();
  for (int it = 0; it < options.max_iterations; ++it) {
    check_overlap();
    // Residuals at the current iterate.
    const Eigen::MatrixXd M = amplitude_matrix();
    const Eigen::Map<const Eigen::VectorXd> a(P.amplitudes.data(), k);
    double res = ((M * a - kappa).cwiseAbs().array() / kappa.array()).maxCoeff();
    if (!linear)
      for (int j = 0; j < k; ++j)
        res = std::max(res, std::abs(core_radius_residual(eps, P.amplitudes[j], P.R, P.core_radii[j], *profile)));
    const AnsatzField field(ev, P);
    std::vector<Vec2> rest(k);
    for (int j = 0; j < k; ++j) {
      const Vec2 grad = field.gradient(P.targets[j]);
      res = std::max(res, grad.norm() / field.gradient_scale(j));
      const Vec2 d = P.targets[j] - P.centers[j];
      rest[j] = grad - radial_gradient(core_profile_radial(P, j, d.norm()).radial_derivative, d);
    }
    P.iterations = it;
    P.residual = res;
    if (res <= options.tol) return P;

    // Amplitudes and radii: inner fixed point at frozen centers.
    for (int inner = 0; inner < 100; ++inner) {
      const Eigen::VectorXd a_new = amplitude_matrix().partialPivLu().solve(kappa);
      const double change = ((a_new - Eigen::Map<const Eigen::VectorXd>(P.amplitudes.data(), k)).cwiseAbs().array() /
                             kappa.array())
                                .maxCoeff();
      for (int j = 0; j < k; ++j) {
        if (!(a_new[j] > 0.0)) fail(ErrorCode::NoConvergence, "ansatz: amplitude became non-positive");
        P.amplitudes[j] = a_new[j];
      }
      update_radii();
      if (change <= 1e-3 * options.tol) break;
    }

    // Centering: place each core so that its slope at z_j balances the rest.
    for (int j = 0; j < k; ++j) {
      const double n = rest[j].norm();
      const double rho = invert_core_slope(P, j, n);
      // W_j' < 0 inside, so grad W_j(d) = -|W_j'| d / |d|; balance needs d along rest.
      const Vec2 d = n > 0.0 ? Vec2(rho * rest[j] / n) : Vec2::Zero();
      const Vec2 x_new = P.targets[j] - d;
      P.centers[j] += options.center_damping * (x_new - P.centers[j]);
    }
  }
  fail(ErrorCode::NoConvergence, "ansatz: fixed point did not reach tolerance");
}

}  // namespace vortexlab
