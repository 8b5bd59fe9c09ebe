// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/domain.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace vortexlab {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

// Proper intersection of segments p0p1 and q0q1 (shared endpoints excluded).
bool segments_cross(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1) {
  const double d1 = cross(p1 - p0, q0 - p0);
  const double d2 = cross(p1 - p0, q1 - p0);
  const double d3 = cross(q1 - q0, p0 - q0);
  const double d4 = cross(q1 - q0, p1 - q0);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

constexpr int kPolyPerKnot = 16;
constexpr int kMinPoly = 4096;

}  // namespace

Domain Domain::unit_disk() { return Domain(); }

Domain Domain::ellipse(double a, double b, int n_points) {
  if (!(a > 0.0) || !(b > 0.0) || n_points < 8) fail(ErrorCode::InvalidDomain, "bad ellipse");
  std::vector<Vec2> pts;
  pts.reserve(n_points);
  for (int k = 0; k < n_points; ++k) {
    const double t = kTwoPi * k / n_points;
    pts.emplace_back(a * std::cos(t), b * std::sin(t));
  }
  return from_points(std::move(pts));
}

Domain Domain::from_points(std::vector<Vec2> points) {
  if (points.size() >= 2 && (points.front() - points.back()).norm() == 0.0) points.pop_back();
  if (points.size() < 8) fail(ErrorCode::InvalidDomain, "boundary needs at least 8 distinct points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) fail(ErrorCode::InvalidDomain, "non-finite boundary point");
    if ((points[i] - points[(i + 1) % points.size()]).norm() == 0.0)
      fail(ErrorCode::InvalidDomain, "repeated consecutive boundary point");
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    area2 += cross(points[i], points[(i + 1) % points.size()]);
  if (area2 < 0.0) std::reverse(points.begin(), points.end());

  Domain d;
  d.kind_ = DomainKind::BoundaryCurve;
  d.input_ = std::move(points);
  d.finalize_curve();
  return d;
}

void Domain::finalize_curve() {
  const int n = static_cast<int>(input_.size());
  knots_.assign(n + 1, 0.0);
  for (int i = 0; i < n; ++i) knots_[i + 1] = knots_[i] + (input_[(i + 1) % n] - input_[i]).norm();
  period_ = knots_[n];

  // Periodic cubic spline: h_{k-1} M_{k-1} + 2 (h_{k-1} + h_k) M_k + h_k M_{k+1} = rhs_k.
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::MatrixX2d rhs(n, 2);
  for (int k = 0; k < n; ++k) {
    const int km = (k + n - 1) % n;
    const int kp = (k + 1) % n;
    const double hm = knots_[km + 1] - knots_[km];
    const double hk = knots_[k + 1] - knots_[k];
    trips.emplace_back(k, km, hm);
    trips.emplace_back(k, k, 2.0 * (hm + hk));
    trips.emplace_back(k, kp, hk);
    const Vec2 r = 6.0 * ((input_[kp] - input_[k]) / hk - (input_[k] - input_[km]) / hm);
    rhs(k, 0) = r.x();
    rhs(k, 1) = r.y();
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(m);
  if (lu.info() != Eigen::Success) fail(ErrorCode::InvalidDomain, "spline system is singular");
  const Eigen::MatrixX2d sol = lu.solve(rhs);
  second_.resize(n);
  for (int k = 0; k < n; ++k) second_[k] = Vec2(sol(k, 0), sol(k, 1));

  const int n_poly = std::max(kMinPoly, kPolyPerKnot * n);
  poly_.resize(n_poly);
  for (int i = 0; i < n_poly; ++i) poly_[i] = spline_point(period_ * i / n_poly, nullptr);

  perimeter_ = 0.0;
  double area2 = 0.0;
  Vec2 c = Vec2::Zero();
  lo_ = hi_ = poly_[0];
  for (int i = 0; i < n_poly; ++i) {
    const Vec2& a = poly_[i];
    const Vec2& b = poly_[(i + 1) % n_poly];
    perimeter_ += (b - a).norm();
    const double w = cross(a, b);
    area2 += w;
    c += w * (a + b);
    lo_ = lo_.cwiseMin(a);
    hi_ = hi_.cwiseMax(a);
  }
  if (!(area2 > 0.0)) fail(ErrorCode::InvalidDomain, "degenerate boundary");
  centroid_ = c / (3.0 * area2);

  // Self-intersection at polyline resolution; bounding boxes prune most pairs.
  for (int i = 0; i < n_poly; ++i) {
    const Vec2& p0 = poly_[i];
    const Vec2& p1 = poly_[(i + 1) % n_poly];
    const Vec2 plo = p0.cwiseMin(p1), phi = p0.cwiseMax(p1);
    for (int j = i + 2; j < n_poly; ++j) {
      if (i == 0 && j == n_poly - 1) continue;
      const Vec2& q0 = poly_[j];
      const Vec2& q1 = poly_[(j + 1) % n_poly];
      if (std::max(q0.x(), q1.x()) < plo.x() || std::min(q0.x(), q1.x()) > phi.x() ||
          std::max(q0.y(), q1.y()) < plo.y() || std::min(q0.y(), q1.y()) > phi.y())
        continue;
      if (segments_cross(p0, p1, q0, q1)) fail(ErrorCode::InvalidDomain, "boundary self-intersects");
    }
  }

  diameter_ = 0.0;
  for (int i = 0; i < n_poly; ++i)
    for (int j = i + 1; j < n_poly; ++j) diameter_ = std::max(diameter_, (poly_[i] - poly_[j]).squaredNorm());
  diameter_ = std::sqrt(diameter_);
}

Vec2 Domain::spline_point(double t, Vec2* derivative) const {
  const int n = static_cast<int>(input_.size());
  t = std::fmod(t, period_);
  if (t < 0.0) t += period_;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  int k = static_cast<int>(it - knots_.begin()) - 1;
  k = std::clamp(k, 0, n - 1);
  const int kp = (k + 1) % n;
  const double h = knots_[k + 1] - knots_[k];
  const double a = (knots_[k + 1] - t) / h;
  const double b = (t - knots_[k]) / h;
  const Vec2& y0 = input_[k];
  const Vec2& y1 = input_[kp];
  const Vec2& m0 = second_[k];
  const Vec2& m1 = second_[kp];
  if (derivative) {
    *derivative = (y1 - y0) / h - (3.0 * a * a - 1.0) * h / 6.0 * m0 + (3.0 * b * b - 1.0) * h / 6.0 * m1;
  }
  return a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * (h * h / 6.0);
}

bool Domain::contains(const Vec2& x) const {
  if (kind_ == DomainKind::UnitDisk) return x.squaredNorm() < 1.0;
  bool inside = false;
  const int n = static_cast<int>(poly_.size());
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly_[i];
    const Vec2& b = poly_[j];
    if ((a.y() > x.y()) != (b.y() > x.y())) {
      const double xc = a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x.x() < xc) inside = !inside;
    }
  }
  return inside;
}

double Domain::boundary_distance(const Vec2& x) const {
  if (kind_ == DomainKind::UnitDisk) return std::abs(1.0 - x.norm());
  double best = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(poly_.size());
  for (int i = 0; i < n; ++i) best = std::min(best, segment_distance(x, poly_[i], poly_[(i + 1) % n]));
  return best;
}

std::vector<BoundarySample> Domain::boundary_samples(int n) const {
  std::vector<BoundarySample> out(n);
  for (int i = 0; i < n; ++i) {
    if (kind_ == DomainKind::UnitDisk) {
      const double t = kTwoPi * i / n;
      out[i].point = Vec2(std::cos(t), std::sin(t));
      out[i].normal = out[i].point;
    } else {
      Vec2 d;
      out[i].point = spline_point(period_ * i / n, &d);
      out[i].normal = Vec2(d.y(), -d.x()).normalized();
    }
  }
  return out;
}

double Domain::exit_fraction(const Vec2& a, const Vec2& b) const {
  const Vec2 d = b - a;
  if (kind_ == DomainKind::UnitDisk) {
    // |a + t d|^2 = 1, positive root.
    const double qa = d.squaredNorm();
    const double qb = 2.0 * a.dot(d);
    const double qc = a.squaredNorm() - 1.0;
    const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
    const double t = (-qb + std::sqrt(disc)) / (2.0 * qa);
    return std::clamp(t, 0.0, 1.0);
  }
  double best = 1.0;
  const int n = static_cast<int>(poly_.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& p = poly_[i];
    const Vec2 e = poly_[(i + 1) % n] - p;
    const double den = cross(d, e);
    if (den == 0.0) continue;
    const double t = cross(p - a, e) / den;
    const double s = cross(p - a, d) / den;
    if (t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0) best = std::min(best, t);
  }
  return best;
}

std::vector<double> Domain::row_crossings(double y) const {
  std::vector<double> xs;
  if (kind_ == DomainKind::UnitDisk) {
    if (std::abs(y) < 1.0) {
      const double s = std::sqrt(1.0 - y * y);
      xs = {-s, s};
    }
    return xs;
  }
  const int n = static_cast<int>(poly_.size());
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly_[i];
    const Vec2& b = poly_[j];
    if ((a.y() > y) != (b.y() > y)) xs.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

Domain load_boundary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open boundary file " + path);
  std::vector<Vec2> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x = 0.0, y = 0.0;
    if (!(ss >> x >> y)) {
      if (pts.empty()) continue;  // header
      fail(ErrorCode::InvalidDomain, path + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    pts.emplace_back(x, y);
  }
  return Domain::from_points(std::move(pts));
}

}  // namespace vortexlab
