// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/diagnostics.hpp"

#include "vortexlab/kirchhoff_routh.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <deque>

namespace vortexlab {

namespace {

bool is_linear(double p) { return std::abs(p - 1.0) < 1e-12; }

}  // namespace

std::vector<AsymptoticRow> asymptotic_report(const StreamSolution& sol, const std::vector<CoreMeasurement>& cores,
                                             const RadialProfile& profile) {
  std::vector<AsymptoticRow> rows;
  const double lnl = std::log(sol.lambda);
  for (std::size_t j = 0; j < cores.size(); ++j) {
    AsymptoticRow r;
    r.vortex = static_cast<int>(j);
    r.lambda = sol.lambda;
    r.p = sol.p;
    r.strength = sol.strengths[j];
    r.cut_level = sol.cut_levels[j];
    r.radius = cores[j].radius;
    r.strength_ratio = 4.0 * kPi * r.cut_level / (r.strength * lnl);
    if (is_linear(sol.p))
      r.radius_ratio = r.radius * std::sqrt(sol.lambda) / profile.edge_radius;
    else
      r.radius_ratio = r.strength * std::pow(sol.lambda * r.radius * r.radius, 1.0 / (sol.p - 1.0)) /
                       (kTwoPi * std::abs(profile.dphi_edge));
    r.size_monitor = sol.lambda * 4.0 * r.radius * r.radius;
    rows.push_back(r);
  }
  return rows;
}

std::vector<AsymptoticRow> asymptotic_report(const StreamSolution& sol, const RadialProfile& profile) {
  return asymptotic_report(sol, measure_vortex_cores(sol), profile);
}

Rescaling rescale_solution(const StreamSolution& sol, const std::vector<CoreMeasurement>& cores,
                           const RadialProfile& profile) {
  Rescaling s;
  const double lnl = std::log(sol.lambda);
  if (is_linear(sol.p)) {
    s.c = 4.0 * kPi / lnl;
  } else {
    const double r = cores.at(0).radius;
    s.c = kTwoPi * std::abs(profile.dphi_edge) /
          (sol.strengths[0] * std::pow(sol.lambda * r * r, 1.0 / (sol.p - 1.0))) * 4.0 * kPi / lnl;
  }
  s.lambda_bar = std::pow(s.c, 1.0 - sol.p) * sol.lambda;
  s.eps = 1.0 / std::sqrt(s.lambda_bar);
  for (double c : sol.cut_levels) s.kappa_lambda.push_back(s.c * c);
  return s;
}

AnsatzResidual residual_against_field(const StreamSolution& sol, double c, const AnsatzField& field) {
  const GridSystem& grid = *sol.grid;
  const AnsatzParams& prm = field.params();
  AnsatzResidual out;
  for (double s : prm.core_radii) out.max_core_radius = std::max(out.max_core_radius, s);
  for (int u = 0; u < grid.unknowns(); ++u) {
    const int f = grid.unknown_node(u);
    const Vec2 y = grid.node(f);
    const double d = std::abs(c * sol.psi[f] - field.value(y));
    out.max_norm = std::max(out.max_norm, d);
    for (int j = 0; j < prm.k(); ++j)
      if ((y - prm.centers[j]).norm() <= 2.0 * prm.core_radii[j]) out.core_norm = std::max(out.core_norm, d);
  }
  out.scaled = out.max_norm * std::abs(std::log(prm.eps)) / out.max_core_radius;
  return out;
}

AnsatzComparison residual_against_ansatz(const GreenEvaluator& ev, const StreamSolution& sol,
                                         const std::vector<CoreMeasurement>& cores, const RadialProfile& profile) {
  AnsatzComparison out;
  out.scaling = rescale_solution(sol, cores, profile);
  std::vector<Vec2> peaks;
  for (const CoreMeasurement& m : cores) peaks.push_back(m.peak);
  out.params = assemble_ansatz(ev, out.scaling.eps, out.scaling.kappa_lambda, peaks,
                               std::make_shared<const RadialProfile>(profile));
  const AnsatzField field(ev, out.params);
  out.residual = residual_against_field(sol, out.scaling.c, field);
  return out;
}

FlowFields recover_velocity_pressure(const StreamSolution& sol, Exec exec) {
  const GridSystem& grid = *sol.grid;
  const int n = grid.n();
  FlowFields out;
  Eigen::VectorXd gx, gy;
  central_gradient(grid, sol.psi, exec, gx, gy);
  out.vx = gy;
  out.vy = -gx;
  out.pressure = Eigen::VectorXd::Zero(grid.node_count());
  for (int u = 0; u < grid.unknowns(); ++u) {
    const int f = grid.unknown_node(u);
    double P = -0.5 * (gx[f] * gx[f] + gy[f] * gy[f]);
    const int j = sol.mask_of[u];
    if (j >= 0) {
      const double t = sol.psi[f] - sol.cut_levels[j];
      if (t > 0.0) P += sol.lambda / (sol.p + 1.0) * std::pow(t, sol.p + 1.0);
    }
    out.pressure[f] = P;
  }
  Eigen::VectorXd dxx, dxy, dyx, dyy;
  central_gradient(grid, out.vx, exec, dxx, dxy);
  central_gradient(grid, out.vy, exec, dyx, dyy);
  out.divergence = dxx + dyy;
  for (int j = 2; j < n - 2; ++j)
    for (int i = 2; i < n - 2; ++i) {
      const int f = grid.flat(i, j);
      bool inside = true;
      for (int dj = -2; dj <= 2 && inside; ++dj)
        for (int di = -2; di <= 2 && inside; ++di) inside = grid.node_unknown(grid.flat(i + di, j + dj)) >= 0;
      if (!inside) continue;
      out.max_divergence = std::max(out.max_divergence, std::abs(out.divergence[f]));
      out.max_speed = std::max(out.max_speed, std::hypot(out.vx[f], out.vy[f]));
    }
  return out;
}

BernoulliReport bernoulli_check(const StreamSolution& sol, const std::vector<CoreMeasurement>& cores,
                                const BernoulliOptions& options, Exec exec) {
  const GridSystem& grid = *sol.grid;
  const Domain& dom = grid.domain();
  const int n = grid.n();
  const double h = grid.h();
  const FlowFields flow = recover_velocity_pressure(sol, exec);
  Eigen::VectorXd ax_x, ax_y, ay_x, ay_y;
  central_gradient(grid, flow.vx, exec, ax_x, ax_y);
  central_gradient(grid, flow.vy, exec, ay_x, ay_y);

  // Irrotational region.
  const double margin = std::max(options.boundary_margin * dom.diameter(), 3.0 * h);
  std::vector<char> region(grid.node_count(), 0);
  for (int f = 0; f < grid.node_count(); ++f) {
    if (grid.node_unknown(f) < 0) continue;
    const Vec2 x = grid.node(f);
    bool ok = dom.boundary_distance(x) > margin;
    for (const CoreMeasurement& m : cores) ok = ok && (x - m.peak).norm() > options.core_factor * m.radius;
    region[f] = ok;
  }
  // Convective acceleration a = (v . grad) v.
  Eigen::VectorXd ax = flow.vx.cwiseProduct(ax_x) + flow.vy.cwiseProduct(ax_y);
  Eigen::VectorXd ay = flow.vx.cwiseProduct(ay_x) + flow.vy.cwiseProduct(ay_y);

  // Connected components in flat order.
  std::vector<int> comp(grid.node_count(), -1);
  std::vector<std::vector<int>> members;
  for (int f = 0; f < grid.node_count(); ++f) {
    if (!region[f] || comp[f] >= 0) continue;
    const int id = static_cast<int>(members.size());
    members.emplace_back();
    std::deque<int> queue{f};
    comp[f] = id;
    while (!queue.empty()) {
      const int g = queue.front();
      queue.pop_front();
      members[id].push_back(g);
      const int i = g % n, j = g / n;
      const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[0] >= n || q[1] < 0 || q[1] >= n) continue;
        const int e = grid.flat(q[0], q[1]);
        if (region[e] && comp[e] < 0) {
          comp[e] = id;
          queue.push_back(e);
        }
      }
    }
  }

  BernoulliReport rep;
  for (const std::vector<int>& nodes : members) {
    if (static_cast<int>(nodes.size()) < options.min_component_nodes) continue;
    std::vector<int> sorted = nodes;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> local(grid.node_count(), -1);
    for (std::size_t a = 0; a < sorted.size(); ++a) local[sorted[a]] = static_cast<int>(a);
    const int m = static_cast<int>(sorted.size());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    auto edge = [&](int a, int b, double d) {
      // (P_b - P_a - d)^2
      const int la = local[a], lb = local[b];
      trip.emplace_back(la, la, 1.0);
      trip.emplace_back(lb, lb, 1.0);
      trip.emplace_back(la, lb, -1.0);
      trip.emplace_back(lb, la, -1.0);
      rhs[lb] += d;
      rhs[la] -= d;
    };
    for (int f : sorted) {
      const int i = f % n, j = f / n;
      if (i + 1 < n && local[f + 1] >= 0) edge(f, f + 1, -0.5 * h * (ax[f] + ax[f + 1]));
      if (j + 1 < n && local[f + n] >= 0) edge(f, f + n, -0.5 * h * (ay[f] + ay[f + n]));
    }
    trip.emplace_back(0, 0, 1.0);  // fixes P at the first node
    Eigen::SparseMatrix<double> L(m, m);
    L.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(L);
    const Eigen::VectorXd P = ldlt.solve(rhs);
    double mean = 0.0;
    Eigen::VectorXd B(m);
    for (int a = 0; a < m; ++a) {
      const int f = sorted[a];
      const double ke = 0.5 * (flow.vx[f] * flow.vx[f] + flow.vy[f] * flow.vy[f]);
      B[a] = P[a] + ke;
      mean += B[a];
      rep.velocity_scale = std::max(rep.velocity_scale, ke);
    }
    mean /= m;
    double var = 0.0;
    for (int a = 0; a < m; ++a) var += (B[a] - mean) * (B[a] - mean);
    BernoulliComponent c;
    c.nodes = m;
    c.mean = mean;
    c.stdev = std::sqrt(var / m);
    rep.max_stdev = std::max(rep.max_stdev, c.stdev);
    rep.components.push_back(c);
  }
  return rep;
}

NecessaryCondition necessary_condition_check(const GreenEvaluator& ev, const std::vector<CoreMeasurement>& cores,
                                             const std::vector<double>& strengths) {
  NecessaryCondition out;
  VortexConfig cfg;
  for (const CoreMeasurement& m : cores) {
    cfg.points.push_back(m.peak);
    out.max_radius = std::max(out.max_radius, m.radius);
  }
  cfg.strengths = strengths;
  out.gradient = kr_gradient(ev, cfg);
  out.grad_norm = out.gradient.norm();
  out.ratio = out.max_radius > 0.0 ? out.grad_norm / out.max_radius : 0.0;
  return out;
}

}  // namespace vortexlab
