// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/domain.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <vector>

namespace vortexlab {

// Uniform n x n node lattice over the square hull of the domain's bounding box,
// with the 5-point -Laplacian on interior nodes and a symmetric ghost-value
// Dirichlet treatment at the true boundary crossings. Nodes outside the domain
// or within 1e-9 of the boundary carry the boundary value 0.
//
// Node (i, j) is column i, row j, at origin + h (i, j); flat index j n + i.
class GridSystem {
 public:
  static std::shared_ptr<const GridSystem> build(const Domain& domain, int n);

  const Domain& domain() const { return domain_; }
  int n() const { return n_; }
  double h() const { return h_; }
  Vec2 origin() const { return origin_; }
  Vec2 node(int i, int j) const { return origin_ + h_ * Vec2(i, j); }
  Vec2 node(int flat) const { return node(flat % n_, flat / n_); }
  int flat(int i, int j) const { return j * n_ + i; }
  int node_count() const { return n_ * n_; }

  int unknowns() const { return static_cast<int>(unknown_node_.size()); }
  int unknown_node(int u) const { return unknown_node_[u]; }
  int node_unknown(int flat) const { return node_unknown_[flat]; }

  // SPD discrete -Laplacian on the unknowns (row-major copy for kernels).
  const Eigen::SparseMatrix<double>& laplacian() const { return A_; }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& laplacian_rows() const { return A_rows_; }
  // Solves A u = rhs with the factorization computed at build time.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  // Unknown vector -> node field (0 off the unknowns), and back.
  Eigen::VectorXd scatter(const Eigen::VectorXd& u) const;
  Eigen::VectorXd gather(const Eigen::VectorXd& field) const;

  // Bicubic (Catmull-Rom) interpolation of a node field and its gradient.
  double interpolate(const Eigen::VectorXd& field, const Vec2& x) const;
  Vec2 interpolate_gradient(const Eigen::VectorXd& field, const Vec2& x) const;

 private:
  GridSystem(const Domain& domain) : domain_(domain) {}
  Domain domain_;
  int n_ = 0;
  double h_ = 0.0;
  Vec2 origin_ = Vec2::Zero();
  std::vector<int> unknown_node_;
  std::vector<int> node_unknown_;
  Eigen::SparseMatrix<double> A_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A_rows_;
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
};

}  // namespace vortexlab
