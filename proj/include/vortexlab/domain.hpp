// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/core.hpp"

#include <string>
#include <vector>

namespace vortexlab {

enum class DomainKind { UnitDisk, BoundaryCurve };

struct BoundarySample {
  Vec2 point;
  Vec2 normal;  // outward unit normal
};

// Bounded simply connected planar domain. The curve variant stores a periodic
// cubic spline through the input points (chord-length parameter) and a dense
// polyline used for inside tests, distances and segment crossings.
class Domain {
 public:
  static Domain unit_disk();
  // Points are taken as a closed curve; clockwise input is reversed.
  static Domain from_points(std::vector<Vec2> points);
  static Domain ellipse(double a, double b, int n_points = 256);

  DomainKind kind() const { return kind_; }
  double diameter() const { return diameter_; }
  double perimeter() const { return perimeter_; }
  Vec2 centroid() const { return centroid_; }
  Vec2 bbox_min() const { return lo_; }
  Vec2 bbox_max() const { return hi_; }
  const std::vector<Vec2>& input_points() const { return input_; }

  bool contains(const Vec2& x) const;
  double boundary_distance(const Vec2& x) const;
  // n samples equispaced in the curve parameter.
  std::vector<BoundarySample> boundary_samples(int n) const;
  // Fraction t in (0, 1] of the first boundary crossing on a -> b, where a is
  // inside and b is outside.
  double exit_fraction(const Vec2& a, const Vec2& b) const;
  // Sorted x coordinates where the horizontal line at height y meets the boundary.
  std::vector<double> row_crossings(double y) const;

 private:
  Domain() = default;
  Vec2 spline_point(double t, Vec2* derivative) const;
  void finalize_curve();

  DomainKind kind_ = DomainKind::UnitDisk;
  std::vector<Vec2> input_;
  std::vector<double> knots_;  // cumulative chord length, size n + 1
  std::vector<Vec2> second_;   // spline second derivatives at knots
  double period_ = 0.0;
  std::vector<Vec2> poly_;     // dense closed polyline (last != first)
  double diameter_ = 2.0;
  double perimeter_ = kTwoPi;
  Vec2 centroid_ = Vec2::Zero();
  Vec2 lo_ = Vec2(-1.0, -1.0);
  Vec2 hi_ = Vec2(1.0, 1.0);
};

// Two-column CSV (x,y); an optional header line is skipped and a duplicated
// closing point is dropped.
Domain load_boundary_csv(const std::string& path);

}  // namespace vortexlab
