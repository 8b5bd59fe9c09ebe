// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/kirchhoff_routh.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace vortexlab {

namespace {

double collision_threshold(const GreenEvaluator& ev) { return 1e-6 * ev.domain().diameter(); }

bool admissible(const GreenEvaluator& ev, const std::vector<Vec2>& pts) {
  const Domain& dom = ev.domain();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!dom.contains(pts[i])) return false;
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if ((pts[i] - pts[j]).norm() < collision_threshold(ev)) return false;
  }
  return true;
}

std::vector<Vec2> unflatten(const Eigen::VectorXd& z) {
  std::vector<Vec2> pts(z.size() / 2);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = Vec2(z[2 * i], z[2 * i + 1]);
  return pts;
}

Eigen::VectorXd flatten(const std::vector<Vec2>& pts) {
  Eigen::VectorXd z(2 * pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) z.segment<2>(2 * i) = pts[i];
  return z;
}

}  // namespace

const char* to_string(CriticalClass c) {
  switch (c) {
    case CriticalClass::NondegenerateMin: return "nondegenerate_min";
    case CriticalClass::NondegenerateSaddle: return "nondegenerate_saddle";
    case CriticalClass::NondegenerateMax: return "nondegenerate_max";
    case CriticalClass::Degenerate: return "degenerate";
  }
  return "unknown";
}

void validate_config(const GreenEvaluator& ev, const VortexConfig& cfg) {
  if (cfg.points.empty() || cfg.points.size() != cfg.strengths.size())
    fail(ErrorCode::InvalidArgument, "points and strengths must be non-empty and of equal length");
  for (double s : cfg.strengths)
    if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "vortex strengths must be positive");
  for (const Vec2& p : cfg.points)
    if (!ev.domain().contains(p)) fail(ErrorCode::OutsideDomain, "vortex outside domain");
  for (int i = 0; i < cfg.k(); ++i)
    for (int j = i + 1; j < cfg.k(); ++j)
      if ((cfg.points[i] - cfg.points[j]).norm() < collision_threshold(ev))
        fail(ErrorCode::CoincidentVortices, "vortices " + std::to_string(i) + " and " + std::to_string(j));
}

double kr_value(const GreenEvaluator& ev, const VortexConfig& cfg) {
  validate_config(ev, cfg);
  double w = 0.0;
  for (int i = 0; i < cfg.k(); ++i) {
    const double ki = cfg.strengths[i];
    w += ki * ki * ev.robin_raw(cfg.points[i]);
    for (int j = 0; j < cfg.k(); ++j)
      if (j != i) w -= ki * cfg.strengths[j] * ev.green_raw(cfg.points[i], cfg.points[j]);
  }
  return w;
}

Eigen::VectorXd kr_gradient(const GreenEvaluator& ev, const VortexConfig& cfg) {
  validate_config(ev, cfg);
  const int k = cfg.k();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * k);
  for (int i = 0; i < k; ++i) {
    const double ki = cfg.strengths[i];
    Vec2 gi = ki * ki * ev.robin_gradient_raw(cfg.points[i]);
    for (int j = 0; j < k; ++j)
      if (j != i) gi -= 2.0 * ki * cfg.strengths[j] * ev.green_grad_pole(cfg.points[i], cfg.points[j]);
    g.segment<2>(2 * i) = gi;
  }
  return g;
}

KrDerivatives kr_derivatives(const GreenEvaluator& ev, const VortexConfig& cfg) {
  KrDerivatives d;
  d.gradient = kr_gradient(ev, cfg);
  const int k = cfg.k();
  d.hessian = Eigen::MatrixXd::Zero(2 * k, 2 * k);
  for (int i = 0; i < k; ++i) {
    const double ki = cfg.strengths[i];
    Mat2 hii = ki * ki * ev.robin_hessian_raw(cfg.points[i]);
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      const double c = 2.0 * ki * cfg.strengths[j];
      hii -= c * ev.green_hess_pole(cfg.points[i], cfg.points[j]);
      d.hessian.block<2, 2>(2 * i, 2 * j) = -c * ev.green_hess_mixed(cfg.points[i], cfg.points[j]);
    }
    d.hessian.block<2, 2>(2 * i, 2 * i) = hii;
  }
  d.hessian = 0.5 * (d.hessian + d.hessian.transpose()).eval();
  return d;
}

CriticalClass classify_hessian(const Eigen::VectorXd& eig, double ratio) {
  const double amax = eig.cwiseAbs().maxCoeff();
  const double amin = eig.cwiseAbs().minCoeff();
  if (!(amax > 0.0) || amin < ratio * amax) return CriticalClass::Degenerate;
  if ((eig.array() > 0.0).all()) return CriticalClass::NondegenerateMin;
  if ((eig.array() < 0.0).all()) return CriticalClass::NondegenerateMax;
  return CriticalClass::NondegenerateSaddle;
}

CriticalPointReport find_critical_point(const GreenEvaluator& ev, const VortexConfig& initial,
                                        const CriticalPointOptions& opt) {
  validate_config(ev, initial);
  if (!(opt.tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be positive");
  VortexConfig cfg = initial;
  Eigen::VectorXd z = flatten(cfg.points);
  double mu = 0.0;  // Levenberg parameter

  for (int it = 0; it <= opt.max_iterations; ++it) {
    cfg.points = unflatten(z);
    KrDerivatives d = kr_derivatives(ev, cfg);
    const double gnorm = d.gradient.norm();
    if (gnorm <= opt.tol) {
      CriticalPointReport rep;
      rep.location = cfg.points;
      rep.grad_norm = gnorm;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.hessian);
      rep.hessian_eigenvalues = es.eigenvalues();
      rep.classification = classify_hessian(rep.hessian_eigenvalues, opt.degeneracy_ratio);
      rep.iterations = it;
      return rep;
    }
    if (it == opt.max_iterations) break;

    const double merit = 0.5 * d.gradient.squaredNorm();
    const Eigen::MatrixXd& H = d.hessian;
    const double hscale = std::max(1.0, H.cwiseAbs().maxCoeff());
    bool accepted = false;
    for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
      // Gauss-Newton on grad W = 0: (H^T H + mu I) dz = -H^T g; mu = 0 is plain Newton.
      Eigen::VectorXd dz;
      if (mu == 0.0) {
        dz = H.fullPivLu().solve(-d.gradient);
      } else {
        const Eigen::MatrixXd A = H.transpose() * H + mu * hscale * hscale * Eigen::MatrixXd::Identity(H.rows(), H.cols());
        dz = A.ldlt().solve(-H.transpose() * d.gradient);
      }
      if (!dz.allFinite()) {
        mu = std::max(1e-8, 10.0 * mu);
        continue;
      }
      // Cap the step at a fraction of the domain size.
      const double cap = 0.25 * ev.domain().diameter();
      if (dz.norm() > cap) dz *= cap / dz.norm();
      const double slope = -(H.transpose() * d.gradient).dot(dz);  // -d/dt merit
      double t = 1.0;
      for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
        const Eigen::VectorXd zt = z + t * dz;
        const auto pts = unflatten(zt);
        if (!admissible(ev, pts)) continue;
        VortexConfig trial{pts, cfg.strengths};
        const double mt = 0.5 * kr_gradient(ev, trial).squaredNorm();
        if (mt <= merit - 1e-4 * t * std::max(slope, 0.0) && mt < merit) {
          z = zt;
          accepted = true;
          break;
        }
      }
      if (accepted) {
        mu = mu > 0.0 ? 0.1 * mu : 0.0;
        if (mu < 1e-10) mu = 0.0;
      } else {
        mu = mu == 0.0 ? 1e-6 : 10.0 * mu;
      }
    }
    if (!accepted) {
      // Distinguish a stall at the boundary / collision from a plain stall.
      const auto pts = unflatten(z);
      double margin = 1e300;
      for (const Vec2& p : pts) margin = std::min(margin, ev.domain().boundary_distance(p));
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) margin = std::min(margin, (pts[i] - pts[j]).norm());
      if (margin < 1e-3 * ev.domain().diameter())
        fail(ErrorCode::LeftDomain, "backtracking stalled at the boundary or a collision");
      fail(ErrorCode::NoConvergence, "line search stalled with |grad W| = " + std::to_string(gnorm));
    }
  }
  fail(ErrorCode::NoConvergence, "iteration cap reached");
}

Trajectory integrate_point_vortices(const GreenEvaluator& ev, const VortexConfig& cfg, double T, double dt,
                                    int sample_every) {
  validate_config(ev, cfg);
  if (!(dt > 0.0) || !(T >= 0.0)) fail(ErrorCode::InvalidArgument, "need dt > 0 and T >= 0");
  if (sample_every < 1) sample_every = 1;
  const int k = cfg.k();
  const double collide = collision_threshold(ev);

  auto rhs = [&](const Eigen::VectorXd& z) {
    VortexConfig c{unflatten(z), cfg.strengths};
    for (const Vec2& p : c.points)
      if (!ev.domain().contains(p)) fail(ErrorCode::LeftDomain, "vortex left the domain");
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if ((c.points[i] - c.points[j]).norm() < collide) fail(ErrorCode::CollisionDetected, "vortices collided");
    const Eigen::VectorXd g = kr_gradient(ev, c);
    Eigen::VectorXd v(2 * k);
    for (int i = 0; i < k; ++i) v.segment<2>(2 * i) = -perp_cw(g.segment<2>(2 * i)) / cfg.strengths[i];
    return v;
  };

  Trajectory tr;
  Eigen::VectorXd z = flatten(cfg.points);
  const long n_steps = static_cast<long>(std::llround(T / dt));
  auto record = [&](double t) {
    tr.t.push_back(t);
    tr.states.push_back(unflatten(z));
    tr.energy.push_back(kr_value(ev, VortexConfig{unflatten(z), cfg.strengths}));
  };
  record(0.0);
  for (long n = 1; n <= n_steps; ++n) {
    const Eigen::VectorXd k1 = rhs(z);
    const Eigen::VectorXd k2 = rhs(z + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = rhs(z + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = rhs(z + dt * k3);
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (n % sample_every == 0 || n == n_steps) {
      const auto pts = unflatten(z);
      for (const Vec2& p : pts)
        if (!ev.domain().contains(p)) fail(ErrorCode::LeftDomain, "vortex left the domain");
      record(n * dt);
    }
  }
  return tr;
}

}  // namespace vortexlab
