// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vortexlab {

const char* to_string(GreenMethod method) {
  return method == GreenMethod::ImagesAnalytic ? "images_analytic" : "mfs";
}

struct GreenEvaluator::Impl {
  Domain domain;
  GreenDiagnostics diag;
  std::vector<Vec2> sources;
  std::vector<Vec2> collocation;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;  // square collocation system with zero net charge
  double coincidence_eps = 1e-12;

  explicit Impl(Domain d) : domain(std::move(d)) {}

  Eigen::VectorXd coeffs(const Vec2& pole) const {
    Eigen::VectorXd b(collocation.size() + 1);
    for (std::size_t n = 0; n < collocation.size(); ++n)
      b[n] = -std::log((collocation[n] - pole).norm()) / kTwoPi;
    b[collocation.size()] = 0.0;
    return lu.solve(b);
  }

  double field(const Eigen::VectorXd& c, const Vec2& y) const {
    double s = c[0];
    for (std::size_t m = 0; m < sources.size(); ++m) s -= c[m + 1] * std::log((y - sources[m]).norm()) / kTwoPi;
    return s;
  }

  Vec2 field_grad(const Eigen::VectorXd& c, const Vec2& y) const {
    Vec2 g = Vec2::Zero();
    for (std::size_t m = 0; m < sources.size(); ++m) {
      const Vec2 d = y - sources[m];
      g -= c[m + 1] * d / d.squaredNorm();
    }
    return g / kTwoPi;
  }

  Mat2 field_hess(const Eigen::VectorXd& c, const Vec2& y) const {
    Mat2 h = Mat2::Zero();
    for (std::size_t m = 0; m < sources.size(); ++m) {
      const Vec2 d = y - sources[m];
      const double r2 = d.squaredNorm();
      h -= c[m + 1] * (Mat2::Identity() / r2 - 2.0 * d * d.transpose() / (r2 * r2));
    }
    return h / kTwoPi;
  }
};

namespace {

double singular(const Vec2& x, const Vec2& y) { return -std::log((x - y).norm()) / kTwoPi; }

Vec2 singular_grad_pole(const Vec2& x, const Vec2& y) {
  const Vec2 d = x - y;
  return -d / (kTwoPi * d.squaredNorm());
}

Mat2 singular_hess_pole(const Vec2& x, const Vec2& y) {
  const Vec2 d = x - y;
  const double r2 = d.squaredNorm();
  return -(Mat2::Identity() / r2 - 2.0 * d * d.transpose() / (r2 * r2)) / kTwoPi;
}

struct DiskTerms {
  double D;
  Vec2 dx, dy;
};

DiskTerms disk_terms(const Vec2& x, const Vec2& y) {
  const double D = 1.0 - 2.0 * x.dot(y) + x.squaredNorm() * y.squaredNorm();
  return {D, -2.0 * y + 2.0 * y.squaredNorm() * x, -2.0 * x + 2.0 * x.squaredNorm() * y};
}

constexpr double kFourPi = 4.0 * kPi;

template <class F>
Vec2 fd_grad(const F& f, const Vec2& x, double s) {
  auto once = [&](double h) {
    Vec2 g;
    for (int a = 0; a < 2; ++a) {
      Vec2 e = Vec2::Zero();
      e[a] = h;
      g[a] = (f(x + e) - f(x - e)) / (2.0 * h);
    }
    return g;
  };
  return (4.0 * once(0.5 * s) - once(s)) / 3.0;
}

template <class F>
Mat2 fd_hess(const F& f, const Vec2& x, double s) {
  auto once = [&](double h) {
    Mat2 m;
    const double f0 = f(x);
    const Vec2 ex(h, 0.0), ey(0.0, h);
    m(0, 0) = (f(x + ex) - 2.0 * f0 + f(x - ex)) / (h * h);
    m(1, 1) = (f(x + ey) - 2.0 * f0 + f(x - ey)) / (h * h);
    m(0, 1) = m(1, 0) = (f(x + ex + ey) - f(x + ex - ey) - f(x - ex + ey) + f(x - ex - ey)) / (4.0 * h * h);
    return m;
  };
  return (4.0 * once(0.5 * s) - once(s)) / 3.0;
}

// (a, b) = d/dx_a d/dy_b f(x, y).
template <class F>
Mat2 fd_mixed(const F& f, const Vec2& x, const Vec2& y, double s) {
  auto once = [&](double h) {
    Mat2 m;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        Vec2 ea = Vec2::Zero(), eb = Vec2::Zero();
        ea[a] = h;
        eb[b] = h;
        m(a, b) = (f(x + ea, y + eb) - f(x + ea, y - eb) - f(x - ea, y + eb) + f(x - ea, y - eb)) / (4.0 * h * h);
      }
    return m;
  };
  return (4.0 * once(0.5 * s) - once(s)) / 3.0;
}

// Sources sit at a fixed normal offset outside the boundary, one per collocation point.
// The ladder stops at the first source count whose midpoint residual meets tol.
void fit_mfs(GreenEvaluator::Impl& impl, const GreenOptions& opt) {
  const Domain& dom = impl.domain;
  const double diam = dom.diameter();
  const double offset = 0.025 * diam;

  std::vector<Vec2> probes{dom.centroid()};
  for (const auto& s : dom.boundary_samples(32)) probes.push_back(s.point - 0.05 * diam * s.normal);

  static constexpr int kLadder[] = {64, 96, 128, 192, 256, 384, 512, 768, 1024, 1536, 2048};
  double best = std::numeric_limits<double>::infinity();
  for (int m : kLadder) {
    if (m > opt.max_sources) break;
    const auto fine = dom.boundary_samples(2 * m);
    std::vector<Vec2> src, col, chk;
    for (int n = 0; n < 2 * m; ++n) {
      if (n % 2 == 0) {
        col.push_back(fine[n].point);
        src.push_back(fine[n].point + offset * fine[n].normal);
      } else {
        chk.push_back(fine[n].point);
      }
    }
    Eigen::MatrixXd a(m + 1, m + 1);
    for (int n = 0; n < m; ++n) {
      a(n, 0) = 1.0;
      for (int j = 0; j < m; ++j) a(n, j + 1) = -std::log((col[n] - src[j]).norm()) / kTwoPi;
    }
    a(m, 0) = 0.0;
    a.row(m).tail(m).setOnes();
    impl.lu.compute(a);
    impl.sources = std::move(src);
    impl.collocation = std::move(col);

    double resid = 0.0;
    for (const Vec2& x : probes) {
      const Eigen::VectorXd c = impl.coeffs(x);
      for (const Vec2& y : chk) resid = std::max(resid, std::abs(impl.field(c, y) - singular(x, y)));
    }
    if (!std::isfinite(resid)) resid = std::numeric_limits<double>::infinity();
    best = std::min(best, resid);
    impl.diag.n_sources = m;
    impl.diag.fit_residual = resid;
    if (resid <= opt.tol) return;
  }
  std::ostringstream msg;
  msg.precision(3);
  msg << std::scientific << "MFS boundary residual " << best << " above tol " << opt.tol << " with at most "
      << opt.max_sources << " sources";
  fail(ErrorCode::FitFailed, msg.str());
}

}  // namespace

double disk_regular(const Vec2& x, const Vec2& y) {
  return -std::log(1.0 - 2.0 * x.dot(y) + x.squaredNorm() * y.squaredNorm()) / kFourPi;
}

double disk_robin(const Vec2& x) { return -std::log(1.0 - x.squaredNorm()) / kTwoPi; }

GreenEvaluator GreenEvaluator::build(const Domain& domain, const GreenOptions& options) {
  if (!(options.tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be positive");
  auto impl = std::make_shared<Impl>(domain);
  impl->coincidence_eps = options.coincidence_eps;
  if (domain.kind() == DomainKind::UnitDisk && !options.force_mfs) {
    impl->diag = {GreenMethod::ImagesAnalytic, 0, 0.0, 0.0};
  } else {
    impl->diag.method = GreenMethod::Mfs;
    impl->diag.fd_step = 1e-4 * domain.diameter();
    fit_mfs(*impl, options);
  }
  GreenEvaluator ev;
  ev.impl_ = std::move(impl);
  return ev;
}

const Domain& GreenEvaluator::domain() const { return impl_->domain; }
GreenDiagnostics GreenEvaluator::diagnostics() const { return impl_->diag; }
const std::vector<Vec2>& GreenEvaluator::charge_points() const { return impl_->sources; }

double GreenEvaluator::regular(const Vec2& x, const Vec2& y) const {
  if (impl_->diag.method == GreenMethod::ImagesAnalytic) return disk_regular(x, y);
  return impl_->field(impl_->coeffs(x), y);
}

double GreenEvaluator::green_raw(const Vec2& x, const Vec2& y) const { return singular(x, y) - regular(x, y); }

Vec2 GreenEvaluator::green_grad_pole(const Vec2& x, const Vec2& y) const {
  if (impl_->diag.method == GreenMethod::ImagesAnalytic) {
    const DiskTerms t = disk_terms(x, y);
    return singular_grad_pole(x, y) + t.dx / (kFourPi * t.D);
  }
  const double s = impl_->diag.fd_step;
  return singular_grad_pole(x, y) - fd_grad([&](const Vec2& p) { return regular(p, y); }, x, s);
}

Vec2 GreenEvaluator::green_grad_field(const Vec2& x, const Vec2& y) const {
  if (impl_->diag.method == GreenMethod::ImagesAnalytic) {
    const DiskTerms t = disk_terms(x, y);
    return singular_grad_pole(y, x) + t.dy / (kFourPi * t.D);
  }
  return singular_grad_pole(y, x) - impl_->field_grad(impl_->coeffs(x), y);
}

Mat2 GreenEvaluator::green_hess_pole(const Vec2& x, const Vec2& y) const {
  if (impl_->diag.method == GreenMethod::ImagesAnalytic) {
    const DiskTerms t = disk_terms(x, y);
    const Mat2 d2 = 2.0 * y.squaredNorm() * Mat2::Identity();
    return singular_hess_pole(x, y) + (d2 / t.D - t.dx * t.dx.transpose() / (t.D * t.D)) / kFourPi;
  }
  const double s = impl_->diag.fd_step;
  return singular_hess_pole(x, y) - fd_hess([&](const Vec2& p) { return regular(p, y); }, x, s);
}

Mat2 GreenEvaluator::green_hess_field(const Vec2& x, const Vec2& y) const {
  if (impl_->diag.method == GreenMethod::ImagesAnalytic) {
    const DiskTerms t = disk_terms(x, y);
    const Mat2 d2 = 2.0 * x.squaredNorm() * Mat2::Identity();
    return singular_hess_pole(y, x) + (d2 / t.D - t.dy * t.dy.transpose() / (t.D * t.D)) / kFourPi;
  }
  return singular_hess_pole(y, x) - impl_->field_hess(impl_->coeffs(x), y);
}

Mat2 GreenEvaluator::green_hess_mixed(const Vec2& x, const Vec2& y) const {
  if (impl_->diag.method == GreenMethod::ImagesAnalytic) {
    const DiskTerms t = disk_terms(x, y);
    const Mat2 dxy = -2.0 * Mat2::Identity() + 4.0 * x * y.transpose();
    return -singular_hess_pole(x, y) + (dxy / t.D - t.dx * t.dy.transpose() / (t.D * t.D)) / kFourPi;
  }
  const double s = impl_->diag.fd_step;
  return -singular_hess_pole(x, y) -
         fd_mixed([&](const Vec2& p, const Vec2& q) { return regular(p, q); }, x, y, s);
}

double GreenEvaluator::robin_raw(const Vec2& x) const {
  if (impl_->diag.method == GreenMethod::ImagesAnalytic) return disk_robin(x);
  return regular(x, x);
}

Vec2 GreenEvaluator::robin_gradient_raw(const Vec2& x) const {
  if (impl_->diag.method == GreenMethod::ImagesAnalytic) return x / (kPi * (1.0 - x.squaredNorm()));
  return fd_grad([&](const Vec2& p) { return regular(p, p); }, x, impl_->diag.fd_step);
}

Mat2 GreenEvaluator::robin_hessian_raw(const Vec2& x) const {
  if (impl_->diag.method == GreenMethod::ImagesAnalytic) {
    const double q = 1.0 - x.squaredNorm();
    return (Mat2::Identity() / q + 2.0 * x * x.transpose() / (q * q)) / kPi;
  }
  return fd_hess([&](const Vec2& p) { return regular(p, p); }, x, impl_->diag.fd_step);
}

double GreenEvaluator::green(const Vec2& x, const Vec2& y) const {
  if (!impl_->domain.contains(x) || !impl_->domain.contains(y)) fail(ErrorCode::OutsideDomain, "green: point outside domain");
  if ((x - y).norm() < impl_->coincidence_eps) fail(ErrorCode::CoincidentPoints, "green: |x - y| below epsilon");
  return green_raw(x, y);
}

namespace {
void check_robin_point(const GreenEvaluator::Impl& impl, const Vec2& x) {
  if (!impl.domain.contains(x)) fail(ErrorCode::OutsideDomain, "robin: point outside domain");
  if (impl.domain.boundary_distance(x) < 0.05 * impl.domain.diameter())
    fail(ErrorCode::TooCloseToBoundary, "robin: point within 0.05*diameter of the boundary");
}
}  // namespace

double GreenEvaluator::robin(const Vec2& x) const {
  check_robin_point(*impl_, x);
  return robin_raw(x);
}

Vec2 GreenEvaluator::robin_gradient(const Vec2& x) const {
  check_robin_point(*impl_, x);
  return robin_gradient_raw(x);
}

Mat2 GreenEvaluator::robin_hessian(const Vec2& x) const {
  check_robin_point(*impl_, x);
  return robin_hessian_raw(x);
}

GreenEvaluator::RegularSampler GreenEvaluator::regular_sampler(const Vec2& pole) const {
  RegularSampler s;
  s.impl_ = impl_;
  s.pole_ = pole;
  if (impl_->diag.method == GreenMethod::Mfs) s.coeffs_ = impl_->coeffs(pole);
  return s;
}

double GreenEvaluator::RegularSampler::operator()(const Vec2& y) const {
  if (coeffs_.size() == 0) return disk_regular(pole_, y);
  return impl_->field(coeffs_, y);
}

Vec2 GreenEvaluator::RegularSampler::gradient(const Vec2& y) const {
  if (coeffs_.size() == 0) {
    const DiskTerms t = disk_terms(pole_, y);
    return -t.dy / (kFourPi * t.D);
  }
  return impl_->field_grad(coeffs_, y);
}

}  // namespace vortexlab
