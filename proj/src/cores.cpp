// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/cores.hpp"

#include "vortexlab/stream_solver.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace vortexlab {

CircleFit fit_circle(const std::vector<Vec2>& pts) {
  CircleFit fit;
  const int m = static_cast<int>(pts.size());
  if (m < 3) return fit;
  // Algebraic fit: x^2 + y^2 + D x + E y + F = 0.
  Eigen::MatrixXd M(m, 3);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    M(i, 0) = pts[i].x();
    M(i, 1) = pts[i].y();
    M(i, 2) = 1.0;
    b[i] = -pts[i].squaredNorm();
  }
  const Eigen::Vector3d s = M.colPivHouseholderQr().solve(b);
  Vec2 c(-0.5 * s[0], -0.5 * s[1]);
  double r = std::sqrt(std::max(c.squaredNorm() - s[2], 0.0));
  // Gauss-Newton on sum (|p - c| - r)^2.
  for (int it = 0; it < 20; ++it) {
    Eigen::MatrixXd J(m, 3);
    Eigen::VectorXd res(m);
    for (int i = 0; i < m; ++i) {
      const Vec2 d = pts[i] - c;
      const double n = d.norm();
      res[i] = n - r;
      J(i, 0) = -d.x() / n;
      J(i, 1) = -d.y() / n;
      J(i, 2) = -1.0;
    }
    const Eigen::Vector3d step = J.colPivHouseholderQr().solve(-res);
    c += step.head<2>();
    r += step[2];
    if (step.norm() < 1e-15 * std::max(1.0, r)) break;
  }
  fit.center = c;
  fit.radius = r;
  for (const Vec2& p : pts) fit.max_relative_deviation = std::max(fit.max_relative_deviation, std::abs((p - c).norm() - r) / r);
  return fit;
}

std::vector<std::vector<Vec2>> contour_level(const GridSystem& grid, const Eigen::VectorXd& field, double level,
                                             const std::vector<char>& keep, bool* open) {
  const int n = grid.n();
  *open = false;
  std::unordered_map<long long, Vec2> crossing;
  std::unordered_map<long long, std::vector<long long>> adj;  // edge id -> edge ids linked by a segment

  auto edge_point = [&](long long id) -> Vec2 {
    auto it = crossing.find(id);
    if (it != crossing.end()) return it->second;
    const int f = static_cast<int>(id / 2);
    const int i = f % n, j = f / n;
    const int g = (id % 2 == 0) ? grid.flat(i + 1, j) : grid.flat(i, j + 1);
    const Vec2 a = grid.node(f), b = grid.node(g);
    const double va = field[f] - level, vb = field[g] - level;
    auto fn = [&](double t) { return grid.interpolate(field, a + t * (b - a)) - level; };
    double t = va / (va - vb);
    const double fa = fn(0.0), fb = fn(1.0);
    if ((fa > 0.0) != (fb > 0.0)) {
      std::uintmax_t iters = 60;
      auto tol = [](double x, double y) { return std::abs(y - x) <= 1e-13; };
      const auto r = boost::math::tools::toms748_solve(fn, 0.0, 1.0, fa, fb, tol, iters);
      t = 0.5 * (r.first + r.second);
    }
    const Vec2 p = a + t * (b - a);
    crossing.emplace(id, p);
    return p;
  };
  auto link = [&](long long e1, long long e2) {
    edge_point(e1);
    edge_point(e2);
    adj[e1].push_back(e2);
    adj[e2].push_back(e1);
  };

  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i) {
      const int c0 = grid.flat(i, j), c1 = grid.flat(i + 1, j), c2 = grid.flat(i + 1, j + 1), c3 = grid.flat(i, j + 1);
      if (!(keep[c0] && keep[c1] && keep[c2] && keep[c3])) continue;
      const bool s0 = field[c0] > level, s1 = field[c1] > level, s2 = field[c2] > level, s3 = field[c3] > level;
      const long long e0 = 2LL * c0, e1 = 2LL * c1 + 1, e2 = 2LL * c3, e3 = 2LL * c0 + 1;
      std::vector<long long> cut;
      if (s0 != s1) cut.push_back(e0);
      if (s1 != s2) cut.push_back(e1);
      if (s3 != s2) cut.push_back(e2);
      if (s0 != s3) cut.push_back(e3);
      if (cut.size() == 2) {
        link(cut[0], cut[1]);
      } else if (cut.size() == 4) {
        const double centre = 0.25 * (field[c0] + field[c1] + field[c2] + field[c3]);
        if ((centre > level) == s0) {
          link(e0, e1);
          link(e2, e3);
        } else {
          link(e3, e0);
          link(e1, e2);
        }
      }
    }

  std::vector<std::vector<Vec2>> curves;
  std::unordered_map<long long, bool> used;
  std::vector<long long> ids;
  ids.reserve(adj.size());
  for (const auto& kv : adj) ids.push_back(kv.first);
  std::sort(ids.begin(), ids.end());
  for (long long id : ids)
    if (adj[id].size() != 2) *open = true;
  for (long long start : ids) {
    if (used[start]) continue;
    std::vector<Vec2> curve;
    long long prev = -1, cur = start;
    while (true) {
      used[cur] = true;
      curve.push_back(crossing[cur]);
      long long next = -1;
      for (long long c : adj[cur])
        if (c != prev && !used[c]) {
          next = c;
          break;
        }
      if (next < 0) break;
      prev = cur;
      cur = next;
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

namespace {

Vec2 refine_peak(const GridSystem& grid, const Eigen::VectorXd& field, const Vec2& start) {
  Vec2 x = start;
  const double h = grid.h();
  const double f0 = grid.interpolate(field, start);
  for (int it = 0; it < 8; ++it) {
    const Vec2 g = grid.interpolate_gradient(field, x);
    Mat2 H;
    const double e = 1e-3 * h;
    H.col(0) = (grid.interpolate_gradient(field, x + Vec2(e, 0)) - grid.interpolate_gradient(field, x - Vec2(e, 0))) / (2 * e);
    H.col(1) = (grid.interpolate_gradient(field, x + Vec2(0, e)) - grid.interpolate_gradient(field, x - Vec2(0, e))) / (2 * e);
    H = 0.5 * (H + H.transpose()).eval();
    const Vec2 step = -H.ldlt().solve(g);
    if (!step.allFinite()) break;
    x += step;
    if ((x - start).cwiseAbs().maxCoeff() > h) return start;
    if (step.norm() < 1e-13 * h) break;
  }
  return grid.interpolate(field, x) >= f0 ? x : start;
}

}  // namespace

std::vector<CoreMeasurement> measure_cores(const GridSystem& grid, const Eigen::VectorXd& field,
                                           const std::vector<Vec2>& centers, double delta,
                                           const std::vector<double>& levels, const std::vector<double>& masses,
                                           bool allow_open) {
  std::vector<CoreMeasurement> out;
  for (std::size_t j = 0; j < centers.size(); ++j) {
    std::vector<char> keep(grid.node_count(), 0);
    int best = -1;
    for (int f = 0; f < grid.node_count(); ++f) {
      if (grid.node_unknown(f) < 0 || (grid.node(f) - centers[j]).norm() >= delta) continue;
      keep[f] = 1;
      if (best < 0 || field[f] > field[best]) best = f;
    }
    if (best < 0 || field[best] <= levels[j]) fail(ErrorCode::EmptyCore, "no node above the cut level in mask " + std::to_string(j));
    CoreMeasurement m;
    m.cut_level = levels[j];
    m.mass = j < masses.size() ? masses[j] : 0.0;
    m.peak = refine_peak(grid, field, grid.node(best));
    m.peak_value = grid.interpolate(field, m.peak);
    bool open = false;
    auto curves = contour_level(grid, field, levels[j], keep, &open);
    if (curves.empty() || (open && !allow_open))
      fail(ErrorCode::OpenContour, "free boundary reaches the mask edge for vortex " + std::to_string(j));
    m.open = open;
    std::size_t longest = 0;
    for (std::size_t c = 1; c < curves.size(); ++c)
      if (curves[c].size() > curves[longest].size()) longest = c;
    m.contour = curves[longest];
    const auto& P = m.contour;
    double diam = 0.0, area = 0.0, len = 0.0;
    for (std::size_t a = 0; a < P.size(); ++a) {
      const Vec2& p = P[a];
      const Vec2& q = P[(a + 1) % P.size()];
      area += p.x() * q.y() - q.x() * p.y();
      len += (q - p).norm();
      for (std::size_t b = a + 1; b < P.size(); ++b) diam = std::max(diam, (P[b] - p).norm());
    }
    m.radius = 0.5 * diam;
    m.area = 0.5 * std::abs(area);
    m.contour_length = len;
    m.circle = fit_circle(P);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<CoreMeasurement> measure_vortex_cores(const StreamSolution& sol, bool allow_open) {
  return measure_cores(*sol.grid, sol.psi, sol.centers, sol.delta, sol.cut_levels, sol.masses, allow_open);
}

}  // namespace vortexlab
