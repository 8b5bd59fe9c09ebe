// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/grid.hpp"

#include <functional>
#include <vector>

namespace vortexlab {

// Every kernel has a serial reference path and an OpenMP path. Both compute
// each output entry with the same arithmetic, and reductions are summed
// serially in index order, so the two paths agree bit for bit.
enum class Exec { Serial, Parallel };

// Nonlinear source lambda (psi - c_j)_+^p on unknowns carrying mask id j >= 0,
// its derivative with respect to psi, and per-mask masses h^2 sum f.
struct SourceTerms {
  Eigen::VectorXd f;
  Eigen::VectorXd df;  // empty unless requested
  std::vector<double> mass;
};
void eval_source(const std::vector<int>& mask_of, const Eigen::VectorXd& psi, const std::vector<double>& cut,
                 double lambda, double p, double cell_area, bool with_derivative, Exec exec, SourceTerms& out);

// y = A x for a row-major sparse matrix.
Eigen::VectorXd apply_rows(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A, const Eigen::VectorXd& x,
                           Exec exec);

// min(cap, lambda (psi - level)_+^p) entrywise.
Eigen::VectorXd capped_power(const Eigen::VectorXd& psi, double level, double lambda, double p, double cap,
                             Exec exec);

// Samples fn at every node (flat index order).
Eigen::VectorXd sample_nodes(const GridSystem& grid, const std::function<double(const Vec2&)>& fn, Exec exec);

// Second-order central differences of a node field; zero on the outer frame.
void central_gradient(const GridSystem& grid, const Eigen::VectorXd& field, Exec exec, Eigen::VectorXd& gx,
                      Eigen::VectorXd& gy);

// Sum in index order.
double ordered_sum(const Eigen::VectorXd& v);

}  // namespace vortexlab
