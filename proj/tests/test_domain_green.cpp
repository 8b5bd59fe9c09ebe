// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"
#include "test_util.hpp"
#include "vortexlab/green.hpp"

#include <cmath>

using namespace vortexlab;

namespace {

const GreenEvaluator& disk() {
  static const GreenEvaluator ev = GreenEvaluator::build(Domain::unit_disk());
  return ev;
}

const GreenEvaluator& disk_mfs() {
  static const GreenEvaluator ev = [] {
    GreenOptions o;
    o.force_mfs = true;
    o.tol = 1e-8;
    return GreenEvaluator::build(Domain::unit_disk(), o);
  }();
  return ev;
}

const GreenEvaluator& ellipse() {
  static const GreenEvaluator ev = [] {
    GreenOptions o;
    o.tol = 1e-6;
    return GreenEvaluator::build(Domain::ellipse(1.0, 0.6), o);
  }();
  return ev;
}

}  // namespace

TEST(BuildGreenEvaluator, DiskUsesExactImages) {
  // closed-form images.
  EXPECT_EQ(disk().method(), GreenMethod::ImagesAnalytic);
  EXPECT_EQ(disk().fit_residual(), 0.0);
}

TEST(BuildGreenEvaluator, DiskThroughMfsMatchesImageFormula) {
  // oracle: closed-form disk Green's function.
  EXPECT_EQ(disk_mfs().method(), GreenMethod::Mfs);
  EXPECT_LE(disk_mfs().fit_residual(), 1e-8);
  std::mt19937_64 rng(11);
  for (int a = 0; a < 200; ++a) {
    const Vec2 x = testutil::point_in_disk(rng, 0.8), y = testutil::point_in_disk(rng, 0.8);
    if ((x - y).norm() < 1e-3) continue;
    EXPECT_NEAR(disk_mfs().regular(x, y), oracle::disk_regular(x, y), 1e-7);
    EXPECT_NEAR(disk_mfs().green(x, y), oracle::disk_green(x, y), 1e-7);
  }
}

TEST(BuildGreenEvaluator, EllipseRobinMinimumNearCenter) {
  // brute-force scan of the fitted h.
  EXPECT_EQ(ellipse().method(), GreenMethod::Mfs);
  EXPECT_LE(ellipse().fit_residual(), 1e-6);
  double best = 1e300;
  Vec2 arg = Vec2::Zero();
  for (double x = -0.8; x <= 0.8; x += 0.02)
    for (double y = -0.45; y <= 0.45; y += 0.02) {
      const Vec2 p(x, y);
      if (!ellipse().domain().contains(p) || ellipse().domain().boundary_distance(p) < 0.05 * 2.0) continue;
      const double h = ellipse().robin(p);
      if (h < best) best = h, arg = p;
    }
  EXPECT_LE(arg.norm(), 0.03);
}

TEST(BuildGreenEvaluator, RejectsSelfIntersectingBoundary) {
  std::vector<Vec2> eight;
  for (int a = 0; a < 64; ++a) {
    const double t = kTwoPi * a / 64;
    eight.emplace_back(std::sin(t), std::sin(t) * std::cos(t));
  }
  EXPECT_ERROR_CODE(Domain::from_points(eight), ErrorCode::InvalidDomain);
}

TEST(BuildGreenEvaluator, FitFailsWhenSourcesAreCapped) {
  GreenOptions o;
  o.force_mfs = true;
  o.tol = 1e-14;
  o.max_sources = 64;
  EXPECT_ERROR_CODE(GreenEvaluator::build(Domain::unit_disk(), o), ErrorCode::FitFailed);
}

TEST(GreenValue, DiskExamples) {
  // image formula.
  EXPECT_NEAR(disk().green(Vec2(0.3, 0), Vec2(-0.3, 0)), oracle::disk_green(Vec2(0.3, 0), Vec2(-0.3, 0)), 1e-14);
  EXPECT_NEAR(disk().green(Vec2(0.3, 0), Vec2(-0.3, 0)), 0.09502, 5e-6);
  // H(x, 0) = 0.
  for (const Vec2& x : {Vec2(0.5, 0.1), Vec2(-0.2, 0.7)})
    EXPECT_NEAR(disk().green(x, Vec2::Zero()), std::log(1.0 / x.norm()) / kTwoPi, 1e-14);
}

TEST(GreenValue, Errors) {
  EXPECT_ERROR_CODE(disk().green(Vec2(0.1, 0), Vec2(0.1, 0)), ErrorCode::CoincidentPoints);
  EXPECT_ERROR_CODE(disk().green(Vec2(1.1, 0), Vec2(0.1, 0)), ErrorCode::OutsideDomain);
}

TEST(RobinDerivatives, DiskExamples) {
  // h(x) = -(1/2 pi) ln(1 - |x|^2) and its symbolic Hessian at 0.
  EXPECT_NEAR(disk().robin(Vec2::Zero()), 0.0, 1e-15);
  EXPECT_NEAR(disk().robin(Vec2(0.5, 0)), std::log(4.0 / 3.0) / kTwoPi, 1e-14);
  EXPECT_NEAR(disk().robin(Vec2(0.5, 0)), 0.045786, 1e-6);
  const Mat2 H0 = disk().robin_hessian(Vec2::Zero());
  EXPECT_LE((H0 - Mat2::Identity() / kPi).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(1.0 / kPi, 0.31831, 1e-5);
}

TEST(RobinDerivatives, AgreeWithOracleDifferences) {
  // finite differences of the closed-form h, for both evaluators.
  for (const GreenEvaluator* ev : {&disk(), &disk_mfs()})
    for (const Vec2& x : {Vec2(0.3, -0.2), Vec2(-0.5, 0.4), Vec2(0.0, 0.7)}) {
      EXPECT_NEAR(ev->robin(x), oracle::disk_robin(x), 1e-8);
      EXPECT_LE((ev->robin_gradient(x) - oracle::fd_gradient(oracle::disk_robin, x)).norm(), 1e-7);
      EXPECT_LE((ev->robin_hessian(x) - oracle::fd_hessian(oracle::disk_robin, x)).norm(), 1e-5);
    }
}

TEST(RobinDerivatives, TooCloseToBoundary) {
  EXPECT_ERROR_CODE(disk().robin(Vec2(0.95, 0.0)), ErrorCode::TooCloseToBoundary);
}

TEST(GreenDerivatives, MatchOracleDifferences) {
  // pole and field derivatives of the closed form.
  const Vec2 x(0.3, 0.1), y(-0.4, 0.2);
  auto G = [](const Vec2& a, const Vec2& b) { return oracle::disk_green(a, b); };
  for (const GreenEvaluator* ev : {&disk(), &disk_mfs()}) {
    const double tol = ev == &disk() ? 1e-8 : 1e-6;
    EXPECT_LE((ev->green_grad_pole(x, y) - oracle::fd_gradient([&](const Vec2& p) { return G(p, y); }, x)).norm(), tol);
    EXPECT_LE((ev->green_grad_field(x, y) - oracle::fd_gradient([&](const Vec2& q) { return G(x, q); }, y)).norm(), tol);
    EXPECT_LE((ev->green_hess_field(x, y) - oracle::fd_hessian([&](const Vec2& q) { return G(x, q); }, y)).norm(), 1e-5);
    EXPECT_LE((ev->green_hess_pole(x, y) - oracle::fd_hessian([&](const Vec2& p) { return G(p, y); }, x)).norm(), 1e-5);
    EXPECT_LE((ev->green_hess_mixed(x, y) - oracle::fd_mixed(G, x, y)).norm(), 1e-5);
  }
}

// Invariants on random probe pairs, for the disk (both methods) and the ellipse.
class GreenProperties : public ::testing::TestWithParam<int> {
 protected:
  const GreenEvaluator& ev() const {
    switch (GetParam()) {
      case 0: return disk();
      case 1: return disk_mfs();
      default: return ellipse();
    }
  }
  Vec2 interior(std::mt19937_64& rng) const {
    const Domain& d = ev().domain();
    while (true) {
      const Vec2 p(testutil::uniform(rng, -1, 1), testutil::uniform(rng, -1, 1));
      if (d.contains(p) && d.boundary_distance(p) >= 0.05 * d.diameter()) return p;
    }
  }
};

TEST_P(GreenProperties, SymmetryAndPositivity) {
  std::mt19937_64 rng(100 + GetParam());
  const double tol = std::max(1e-12, 10.0 * ev().fit_residual());
  for (int a = 0; a < 300; ++a) {
    const Vec2 x = interior(rng), y = interior(rng);
    if ((x - y).norm() < 1e-3) continue;
    EXPECT_NEAR(ev().green(x, y), ev().green(y, x), tol);
    EXPECT_GT(ev().green(x, y), 0.0);
  }
}

TEST_P(GreenProperties, VanishesOnBoundary) {
  std::mt19937_64 rng(200 + GetParam());
  const double tol = std::max(1e-12, 10.0 * ev().fit_residual());
  const auto bs = ev().domain().boundary_samples(97);
  for (int a = 0; a < 10; ++a) {
    const Vec2 x = interior(rng);
    for (const BoundarySample& b : bs) EXPECT_LE(std::abs(ev().green_raw(x, b.point)), tol);
  }
}

TEST_P(GreenProperties, RegularPartIsHarmonicAtSecondOrder) {
  // Five-point Laplacian of H(., x) on a patch: error ratio ~4 per halving.
  const Vec2 pole = GetParam() == 2 ? Vec2(0.2, 0.1) : Vec2(0.3, -0.2);
  const Vec2 c(-0.3, 0.1);
  // Scale the patch so truncation dominates rounding.
  double prev = 0.0;
  for (double h : {0.08, 0.04, 0.02}) {
    auto H = [&](const Vec2& y) { return ev().regular(pole, y); };
    const double lap = (H(c + Vec2(h, 0)) + H(c - Vec2(h, 0)) + H(c + Vec2(0, h)) + H(c - Vec2(0, h)) - 4 * H(c)) / (h * h);
    if (prev > 0.0 && std::abs(prev) > 1e-7) EXPECT_GT(std::abs(prev) / std::abs(lap), 3.0);
    prev = lap;
  }
  EXPECT_LT(std::abs(prev), 1e-3);
}

INSTANTIATE_TEST_SUITE_P(Domains, GreenProperties, ::testing::Values(0, 1, 2));

TEST(RobinDerivatives, MfsMatchesDiskFormulaOnInnerDisk) {
  // acceptance-level oracle check on |x| <= 0.8.
  double err = 0.0;
  for (int a = 0; a <= 16; ++a)
    for (int b = 0; b < 24; ++b) {
      const double r = 0.8 * a / 16.0, t = kTwoPi * b / 24.0;
      const Vec2 x = r * Vec2(std::cos(t), std::sin(t));
      err = std::max(err, std::abs(disk_mfs().robin(x) - oracle::disk_robin(x)));
    }
  EXPECT_LE(err, 1e-6);
}
