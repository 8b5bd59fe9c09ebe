// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/grid.hpp"

#include <vector>

namespace vortexlab {

struct StreamSolution;

struct CircleFit {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  double max_relative_deviation = 0.0;  // max | |p - c| - radius | / radius
};

// Least-squares (algebraic) circle through the points, refined by Gauss-Newton
// on the geometric distance.
CircleFit fit_circle(const std::vector<Vec2>& points);

// Closed level curves of a node field restricted to cells whose four corners
// satisfy `keep`. Crossings on cell edges are located on the bicubic
// interpolant. Returns the curves as closed polylines (last != first);
// `open` is set when a curve runs into a discarded cell.
std::vector<std::vector<Vec2>> contour_level(const GridSystem& grid, const Eigen::VectorXd& field, double level,
                                             const std::vector<char>& keep, bool* open);

struct CoreMeasurement {
  Vec2 peak = Vec2::Zero();        // maximum of the bicubic interpolant near the grid argmax
  double peak_value = 0.0;
  double radius = 0.0;             // half the diameter of the superlevel set
  double cut_level = 0.0;
  double mass = 0.0;
  double area = 0.0;               // polygon area of the contour
  double contour_length = 0.0;
  std::vector<Vec2> contour;       // closed free boundary {psi = cut}
  CircleFit circle;
  bool open = false;               // the free boundary reaches the mask edge
};

// Throws EmptyCore (no node above the cut) or, unless allow_open, OpenContour
// (the free boundary reaches the mask edge). With allow_open the longest
// piece of the contour is measured and `open` is set.
std::vector<CoreMeasurement> measure_vortex_cores(const StreamSolution& sol, bool allow_open = false);

// Same measurement for an arbitrary node field with per-vortex centers,
// mask radius and levels.
std::vector<CoreMeasurement> measure_cores(const GridSystem& grid, const Eigen::VectorXd& field,
                                           const std::vector<Vec2>& centers, double delta,
                                           const std::vector<double>& levels, const std::vector<double>& masses,
                                           bool allow_open = false);

}  // namespace vortexlab
