// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace vortexlab {

namespace {

constexpr double kBoundaryEps = 1e-9;
constexpr double kMinFraction = 1e-6;

// Catmull-Rom weights and derivative weights for offset t in [0, 1).
void cubic_weights(double t, double w[4], double dw[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2 * t2 - t);
  w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
  w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
  dw[0] = 0.5 * (-3 * t2 + 4 * t - 1);
  dw[1] = 0.5 * (9 * t2 - 10 * t);
  dw[2] = 0.5 * (-9 * t2 + 8 * t + 1);
  dw[3] = 0.5 * (3 * t2 - 2 * t);
}

}  // namespace

std::shared_ptr<const GridSystem> GridSystem::build(const Domain& domain, int n) {
  if (n < 5) fail(ErrorCode::InvalidArgument, "grid: need at least 5 points per side");
  std::shared_ptr<GridSystem> g(new GridSystem(domain));
  const Vec2 lo = domain.bbox_min(), hi = domain.bbox_max();
  const double side = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  const Vec2 mid = 0.5 * (lo + hi);
  g->n_ = n;
  g->h_ = side / (n - 1);
  g->origin_ = mid - 0.5 * side * Vec2(1.0, 1.0);
  const double h = g->h_;

  // Inside test per row from the sorted boundary crossings.
  std::vector<char> inside(static_cast<std::size_t>(n) * n, 0);
  for (int j = 0; j < n; ++j) {
    const double y = g->origin_.y() + h * j;
    const auto xs = domain.row_crossings(y);
    for (int i = 0; i < n; ++i) {
      const double x = g->origin_.x() + h * i;
      int left = 0;
      bool near = false;
      for (double c : xs) {
        if (c < x) ++left;
        if (std::abs(c - x) < kBoundaryEps) near = true;
      }
      if (left % 2 == 1 && !near) inside[g->flat(i, j)] = 1;
    }
  }
  static constexpr int kDi[4] = {1, -1, 0, 0};
  static constexpr int kDj[4] = {0, 0, 1, -1};
  auto neighbour = [&](int i, int j, int d) {
    const int ii = i + kDi[d], jj = j + kDj[d];
    return (ii >= 0 && ii < n && jj >= 0 && jj < n) ? g->flat(ii, jj) : -1;
  };
  // Nodes lying on the boundary in the vertical direction carry the boundary value.
  for (int f = 0; f < n * n; ++f) {
    if (!inside[f]) continue;
    const int i = f % n, j = f / n;
    for (int d = 0; d < 4; ++d) {
      const int nf = neighbour(i, j, d);
      if (nf >= 0 && inside[nf]) continue;
      const Vec2 a = g->node(i, j);
      if (domain.exit_fraction(a, a + h * Vec2(kDi[d], kDj[d])) * h < kBoundaryEps) inside[f] = 0;
    }
  }

  g->node_unknown_.assign(static_cast<std::size_t>(n) * n, -1);
  for (int f = 0; f < n * n; ++f)
    if (inside[f]) {
      g->node_unknown_[f] = static_cast<int>(g->unknown_node_.size());
      g->unknown_node_.push_back(f);
    }

  const int m = g->unknowns();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * static_cast<std::size_t>(m));
  const double ih2 = 1.0 / (h * h);
  for (int u = 0; u < m; ++u) {
    const int f = g->unknown_node_[u];
    const int i = f % n, j = f / n;
    double diag = 0.0;
    for (int d = 0; d < 4; ++d) {
      const int nf = neighbour(i, j, d);
      if (nf >= 0 && inside[nf]) {
        diag += ih2;
        trip.emplace_back(u, g->node_unknown_[nf], -ih2);
      } else {
        // Ghost value: linear extrapolation through 0 at the boundary crossing.
        const Vec2 a = g->node(i, j);
        const Vec2 b = a + h * Vec2(kDi[d], kDj[d]);
        const double theta = std::max(domain.exit_fraction(a, b), kMinFraction);
        diag += ih2 / theta;
      }
    }
    trip.emplace_back(u, u, diag);
  }
  g->A_.resize(m, m);
  g->A_.setFromTriplets(trip.begin(), trip.end());
  g->A_.makeCompressed();
  g->A_rows_ = g->A_;
  g->ldlt_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(g->A_);
  if (g->ldlt_->info() != Eigen::Success) fail(ErrorCode::NoConvergence, "grid: Laplacian factorization failed");
  return g;
}

Eigen::VectorXd GridSystem::solve(const Eigen::VectorXd& rhs) const { return ldlt_->solve(rhs); }

Eigen::VectorXd GridSystem::scatter(const Eigen::VectorXd& u) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(node_count());
  for (int k = 0; k < unknowns(); ++k) f[unknown_node_[k]] = u[k];
  return f;
}

Eigen::VectorXd GridSystem::gather(const Eigen::VectorXd& field) const {
  Eigen::VectorXd u(unknowns());
  for (int k = 0; k < unknowns(); ++k) u[k] = field[unknown_node_[k]];
  return u;
}

double GridSystem::interpolate(const Eigen::VectorXd& field, const Vec2& x) const {
  const Vec2 q = (x - origin_) / h_;
  const int i0 = std::clamp(static_cast<int>(std::floor(q.x())), 1, n_ - 3);
  const int j0 = std::clamp(static_cast<int>(std::floor(q.y())), 1, n_ - 3);
  double wx[4], dwx[4], wy[4], dwy[4];
  cubic_weights(q.x() - i0, wx, dwx);
  cubic_weights(q.y() - j0, wy, dwy);
  double s = 0.0;
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a) s += wx[a] * wy[b] * field[flat(i0 - 1 + a, j0 - 1 + b)];
  return s;
}

Vec2 GridSystem::interpolate_gradient(const Eigen::VectorXd& field, const Vec2& x) const {
  const Vec2 q = (x - origin_) / h_;
  const int i0 = std::clamp(static_cast<int>(std::floor(q.x())), 1, n_ - 3);
  const int j0 = std::clamp(static_cast<int>(std::floor(q.y())), 1, n_ - 3);
  double wx[4], dwx[4], wy[4], dwy[4];
  cubic_weights(q.x() - i0, wx, dwx);
  cubic_weights(q.y() - j0, wy, dwy);
  Vec2 g = Vec2::Zero();
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a) {
      const double v = field[flat(i0 - 1 + a, j0 - 1 + b)];
      g.x() += dwx[a] * wy[b] * v;
      g.y() += wx[a] * dwy[b] * v;
    }
  return g / h_;
}

}  // namespace vortexlab
