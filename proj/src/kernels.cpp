// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace vortexlab {

namespace {

// Runs body(i) for i in [0, n), threaded when exec is Parallel.
template <class Body>
void for_each_index(int n, Exec exec, const Body& body) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) body(i);
  } else {
    for (int i = 0; i < n; ++i) body(i);
  }
}

}  // namespace

void eval_source(const std::vector<int>& mask_of, const Eigen::VectorXd& psi, const std::vector<double>& cut,
                 double lambda, double p, double cell_area, bool with_derivative, Exec exec, SourceTerms& out) {
  const int n = static_cast<int>(psi.size());
  out.f.resize(n);
  if (with_derivative)
    out.df.resize(n);
  else
    out.df.resize(0);
  for_each_index(n, exec, [&](int u) {
    const int j = mask_of[u];
    double f = 0.0, df = 0.0;
    if (j >= 0) {
      const double t = psi[u] - cut[j];
      if (t > 0.0) {
        const double tp1 = std::pow(t, p - 1.0);
        f = lambda * tp1 * t;
        df = lambda * p * tp1;
      }
    }
    out.f[u] = f;
    if (with_derivative) out.df[u] = df;
  });
  out.mass.assign(cut.size(), 0.0);
  for (int u = 0; u < n; ++u)
    if (mask_of[u] >= 0) out.mass[mask_of[u]] += out.f[u];
  for (double& m : out.mass) m *= cell_area;
}

Eigen::VectorXd apply_rows(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A, const Eigen::VectorXd& x,
                           Exec exec) {
  Eigen::VectorXd y(A.rows());
  const int* outer = A.outerIndexPtr();
  const int* inner = A.innerIndexPtr();
  const double* val = A.valuePtr();
  for_each_index(static_cast<int>(A.rows()), exec, [&](int r) {
    double s = 0.0;
    for (int k = outer[r]; k < outer[r + 1]; ++k) s += val[k] * x[inner[k]];
    y[r] = s;
  });
  return y;
}

Eigen::VectorXd capped_power(const Eigen::VectorXd& psi, double level, double lambda, double p, double cap,
                             Exec exec) {
  Eigen::VectorXd w(psi.size());
  for_each_index(static_cast<int>(psi.size()), exec, [&](int u) {
    const double t = psi[u] - level;
    w[u] = t > 0.0 ? std::min(cap, lambda * std::pow(t, p)) : 0.0;
  });
  return w;
}

Eigen::VectorXd sample_nodes(const GridSystem& grid, const std::function<double(const Vec2&)>& fn, Exec exec) {
  Eigen::VectorXd v(grid.node_count());
  for_each_index(grid.node_count(), exec, [&](int f) { v[f] = fn(grid.node(f)); });
  return v;
}

void central_gradient(const GridSystem& grid, const Eigen::VectorXd& field, Exec exec, Eigen::VectorXd& gx,
                      Eigen::VectorXd& gy) {
  const int n = grid.n();
  const double inv = 0.5 / grid.h();
  gx = Eigen::VectorXd::Zero(grid.node_count());
  gy = Eigen::VectorXd::Zero(grid.node_count());
  for_each_index(n, exec, [&](int j) {
    if (j == 0 || j == n - 1) return;
    for (int i = 1; i < n - 1; ++i) {
      const int f = j * n + i;
      gx[f] = (field[f + 1] - field[f - 1]) * inv;
      gy[f] = (field[f + n] - field[f - n]) * inv;
    }
  });
}

double ordered_sum(const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i];
  return s;
}

}  // namespace vortexlab
