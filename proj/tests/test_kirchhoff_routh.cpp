// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"
#include "test_util.hpp"
#include "vortexlab/kirchhoff_routh.hpp"

#include <cmath>

using namespace vortexlab;

namespace {

const GreenEvaluator& disk() {
  static const GreenEvaluator ev = GreenEvaluator::build(Domain::unit_disk());
  return ev;
}

const GreenEvaluator& ellipse() {
  static const GreenEvaluator ev = [] {
    GreenOptions o;
    o.tol = 1e-8;
    return GreenEvaluator::build(Domain::ellipse(1.0, 0.6), o);
  }();
  return ev;
}

// Independent W on the disk from the closed-form oracle.
double oracle_w(const VortexConfig& c) {
  double w = 0.0;
  for (int i = 0; i < c.k(); ++i) {
    w += c.strengths[i] * c.strengths[i] * oracle::disk_robin(c.points[i]);
    for (int j = 0; j < c.k(); ++j)
      if (i != j) w -= c.strengths[i] * c.strengths[j] * oracle::disk_green(c.points[i], c.points[j]);
  }
  return w;
}

VortexConfig random_config(std::mt19937_64& rng, int k) {
  while (true) {
    VortexConfig c;
    for (int j = 0; j < k; ++j) {
      c.points.push_back(testutil::point_in_disk(rng, 0.8));
      c.strengths.push_back(testutil::uniform(rng, 0.5, 2.0));
    }
    bool ok = true;
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) ok = ok && (c.points[a] - c.points[b]).norm() > 0.1;
    if (ok) return c;
  }
}

Eigen::VectorXd flatten(const VortexConfig& c) {
  Eigen::VectorXd v(2 * c.k());
  for (int j = 0; j < c.k(); ++j) v.segment<2>(2 * j) = c.points[j];
  return v;
}

VortexConfig with_flat(VortexConfig c, const Eigen::VectorXd& v) {
  for (int j = 0; j < c.k(); ++j) c.points[j] = v.segment<2>(2 * j);
  return c;
}

}  // namespace

TEST(KrValue, DiskExamples) {
  // closed-form h.
  EXPECT_NEAR(kr_value(disk(), {{Vec2::Zero()}, {1.0}}), 0.0, 1e-15);
  EXPECT_NEAR(kr_value(disk(), {{Vec2(0.5, 0)}, {2.0}}), 4.0 * std::log(4.0 / 3.0) / kTwoPi, 1e-14);
  // The quoted 0.183146 is rounded; the closed form gives 0.1831441.
  EXPECT_NEAR(kr_value(disk(), {{Vec2(0.5, 0)}, {2.0}}), 0.183146, 5e-6);
}

TEST(KrValue, MatchesOracleOnRandomConfigs) {
  std::mt19937_64 rng(7);
  for (int a = 0; a < 30; ++a) {
    const VortexConfig c = random_config(rng, 1 + a % 3);
    EXPECT_NEAR(kr_value(disk(), c), oracle_w(c), 1e-12 * (1.0 + std::abs(oracle_w(c))));
  }
}

TEST(KrValue, LabelSwapInvariance) {
  // symmetry of the sum.
  const VortexConfig a{{Vec2(0.2, 0.1), Vec2(-0.4, 0.3), Vec2(0.1, -0.5)}, {1.5, 1.5, 0.7}};
  const VortexConfig b{{Vec2(-0.4, 0.3), Vec2(0.2, 0.1), Vec2(0.1, -0.5)}, {1.5, 1.5, 0.7}};
  EXPECT_NEAR(kr_value(disk(), a), kr_value(disk(), b), 1e-15);
  EXPECT_NEAR(kr_value(ellipse(), a), kr_value(ellipse(), b), 1e-12);
}

TEST(KrValue, Errors) {
  EXPECT_ERROR_CODE(kr_value(disk(), {{Vec2(0.1, 0), Vec2(0.1, 0)}, {1, 1}}), ErrorCode::CoincidentVortices);
  EXPECT_ERROR_CODE(kr_value(disk(), {{Vec2(1.2, 0)}, {1}}), ErrorCode::OutsideDomain);
  EXPECT_ERROR_CODE(kr_value(disk(), {{Vec2(0.1, 0)}, {-1}}), ErrorCode::InvalidArgument);
  EXPECT_ERROR_CODE(kr_value(disk(), {{Vec2(0.1, 0)}, {1, 2}}), ErrorCode::InvalidArgument);
}

TEST(KrDerivatives, DiskCenter) {
  // grad h(0) = 0 and Hess h(0) = I / pi.
  for (double kappa : {1.0, 2.0}) {
    const KrDerivatives d = kr_derivatives(disk(), {{Vec2::Zero()}, {kappa}});
    EXPECT_LE(d.gradient.norm(), 1e-14);
    EXPECT_LE((d.hessian - kappa * kappa / kPi * Eigen::Matrix2d::Identity()).norm(), 1e-12);
  }
}

TEST(KrDerivatives, FiniteDifferenceOracle) {
  // FD of the oracle W at a step unrelated to the library.
  std::mt19937_64 rng(21);
  for (int a = 0; a < 20; ++a) {
    const VortexConfig c = random_config(rng, 1 + a % 3);
    const KrDerivatives d = kr_derivatives(disk(), c);
    const Eigen::VectorXd x = flatten(c);
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd g(n);
    const double s = 1e-5;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e[i] = s;
      g[i] = (oracle_w(with_flat(c, x + e)) - oracle_w(with_flat(c, x - e))) / (2 * s);
    }
    EXPECT_LE((d.gradient - g).norm(), 1e-5 * std::max(1.0, g.norm()));
    EXPECT_LE((d.hessian - d.hessian.transpose()).norm(), 1e-8 * std::max(1.0, d.hessian.norm()));
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e[i] = 1e-4;
      H.col(i) = (kr_gradient(disk(), with_flat(c, x + e)) - kr_gradient(disk(), with_flat(c, x - e))) / 2e-4;
    }
    EXPECT_LE((d.hessian - H).norm(), 1e-4 * std::max(1.0, H.norm()));
  }
}

TEST(FindCriticalPoint, DiskSingleVortex) {
  const CriticalPointReport r = find_critical_point(disk(), {{Vec2(0.3, 0.2)}, {1.0}});
  EXPECT_LE(r.location[0].norm(), 1e-8);
  EXPECT_EQ(r.classification, CriticalClass::NondegenerateMin);
  EXPECT_LE(r.grad_norm, 1e-10);
  ASSERT_EQ(r.hessian_eigenvalues.size(), 2);
}

TEST(FindCriticalPoint, EllipseMatchesGridScan) {
  // brute-force 200 x 200 scan of h.
  const CriticalPointReport r = find_critical_point(ellipse(), {{Vec2(0.2, 0.1)}, {1.0}});
  const Domain& d = ellipse().domain();
  double best = 1e300;
  Vec2 arg = Vec2::Zero();
  const double cx = 2.0 / 200, cy = 1.2 / 200;
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 200; ++j) {
      const Vec2 p(-1.0 + (i + 0.5) * cx, -0.6 + (j + 0.5) * cy);
      if (!d.contains(p) || d.boundary_distance(p) < 0.05 * d.diameter()) continue;
      const double h = ellipse().robin(p);
      if (h < best) best = h, arg = p;
    }
  EXPECT_LE(std::abs(r.location[0].x() - arg.x()), cx);
  EXPECT_LE(std::abs(r.location[0].y() - arg.y()), cy);
  EXPECT_EQ(r.classification, CriticalClass::NondegenerateMin);
}

TEST(FindCriticalPoint, SymmetricDiskPairHasNoCriticalPoint) {
  // F(d) = -2 ln(1+d^2) + 2 ln(2d) - 2 ln(1-d^2) has F' > 0 on (0, 1).
  auto F = [](double d) { return -2 * std::log(1 + d * d) + 2 * std::log(2 * d) - 2 * std::log(1 - d * d); };
  for (double d = 0.05; d < 0.95; d += 0.05) {
    EXPECT_GT(F(d + 1e-6) - F(d - 1e-6), 0.0);
    // W on the slice is F / (2 pi) for unit strengths.
    EXPECT_NEAR(kr_value(disk(), {{Vec2(d, 0), Vec2(-d, 0)}, {1, 1}}), F(d) / kTwoPi, 1e-12);
  }
  bool failed = false;
  try {
    find_critical_point(disk(), {{Vec2(0.4, 0), Vec2(-0.4, 0)}, {1, 1}});
  } catch (const Error& e) {
    failed = e.code() == ErrorCode::NoConvergence || e.code() == ErrorCode::LeftDomain;
  }
  EXPECT_TRUE(failed);
}

TEST(FindCriticalPoint, ReturnedGradientBelowTolerance) {
  CriticalPointOptions o;
  o.tol = 1e-9;
  const CriticalPointReport r = find_critical_point(ellipse(), {{Vec2(-0.3, 0.2)}, {1.7}}, o);
  EXPECT_LE(kr_gradient(ellipse(), {r.location, {1.7}}).norm(), o.tol);
  EXPECT_LE(r.grad_norm, o.tol);
}

TEST(FindCriticalPoint, ClassifyHessian) {
  // Degenerate iff min |eig| < ratio * max |eig|.
  EXPECT_EQ(classify_hessian(Eigen::Vector2d(1.0, 2.0), 1e-6), CriticalClass::NondegenerateMin);
  EXPECT_EQ(classify_hessian(Eigen::Vector2d(-1.0, 2.0), 1e-6), CriticalClass::NondegenerateSaddle);
  EXPECT_EQ(classify_hessian(Eigen::Vector2d(-1.0, -2.0), 1e-6), CriticalClass::NondegenerateMax);
  EXPECT_EQ(classify_hessian(Eigen::Vector2d(1e-9, 2.0), 1e-6), CriticalClass::Degenerate);
}

TEST(FindCriticalPoint, ScalingInvariance) {
  // W scales by c^2 and the critical point does not move.
  const VortexConfig a{{Vec2(0.25, -0.1)}, {1.0}};
  const VortexConfig b{{Vec2(0.25, -0.1)}, {3.0}};
  EXPECT_NEAR(kr_value(ellipse(), b), 9.0 * kr_value(ellipse(), a), 1e-12);
  const auto ra = find_critical_point(ellipse(), a), rb = find_critical_point(ellipse(), b);
  EXPECT_LE((ra.location[0] - rb.location[0]).norm(), 1e-8);
}

TEST(IntegratePointVortices, StationaryAtCenter) {
  const Trajectory t = integrate_point_vortices(disk(), {{Vec2::Zero()}, {1.0}}, 10.0, 1e-2, 100);
  for (const auto& s : t.states) EXPECT_LE(s[0].norm(), 1e-15);
}

TEST(IntegratePointVortices, CircularOrbitAndConservation) {
  // h is radial, so |x| is conserved.
  const Trajectory t = integrate_point_vortices(disk(), {{Vec2(0.3, 0)}, {1.0}}, 100.0, 1e-3, 1000);
  double drift = 0.0, wdrift = 0.0;
  for (std::size_t a = 0; a < t.states.size(); ++a) {
    drift = std::max(drift, std::abs(t.states[a][0].norm() - 0.3));
    wdrift = std::max(wdrift, std::abs(t.energy[a] - t.energy[0]) / std::abs(t.energy[0] + 1.0));
  }
  EXPECT_LT(drift, 1e-6);
  EXPECT_LT(wdrift, 1e-6);
  EXPECT_NEAR(t.t.back(), 100.0, 1e-9);
  // The orbit actually moves.
  EXPECT_GT((t.states[1][0] - t.states[0][0]).norm(), 1e-3);
}

TEST(IntegratePointVortices, ThreeVortexConservation) {
  const VortexConfig c{{Vec2(0.4, 0.0), Vec2(-0.2, 0.35), Vec2(-0.2, -0.35)}, {1.0, 1.0, 1.0}};
  const Trajectory t = integrate_point_vortices(disk(), c, 100.0, 1e-3, 1000);
  double wdrift = 0.0;
  for (double w : t.energy) wdrift = std::max(wdrift, std::abs(w - t.energy[0]) / std::abs(t.energy[0] + 1.0));
  EXPECT_LT(wdrift, 1e-6);
}

TEST(IntegratePointVortices, StaysNearMinimum) {
  for (double rho : {0.01, 0.05}) {
    const Trajectory t = integrate_point_vortices(disk(), {{Vec2(rho, 0)}, {1.0}}, 100.0, 1e-3, 500);
    for (const auto& s : t.states) EXPECT_LE(s[0].norm(), 2 * rho);
  }
}

TEST(IntegratePointVortices, FourthOrderDrift) {
  // Energy drift shrinks by well over 8 when dt halves.
  const VortexConfig c{{Vec2(0.6, 0.0), Vec2(-0.3, 0.2)}, {1.0, 0.5}};
  auto drift = [&](double dt) {
    const Trajectory t = integrate_point_vortices(disk(), c, 5.0, dt, 1);
    double d = 0.0;
    for (double w : t.energy) d = std::max(d, std::abs(w - t.energy[0]));
    return d;
  };
  const double a = drift(4e-2), b = drift(2e-2);
  EXPECT_GT(a / b, 8.0);
}

TEST(IntegratePointVortices, Errors) {
  EXPECT_ERROR_CODE(integrate_point_vortices(disk(), {{Vec2(0.1, 0)}, {1}}, 1.0, 0.0), ErrorCode::InvalidArgument);
  // A vortex next to the wall jumps out of the disk with an oversized step.
  EXPECT_ERROR_CODE(integrate_point_vortices(disk(), {{Vec2(0.97, 0)}, {1}}, 5.0, 1.0), ErrorCode::LeftDomain);
}
