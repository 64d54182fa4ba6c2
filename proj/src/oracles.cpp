#include "polyflow/oracles.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "polyflow/errors.hpp"
#include "polyflow/flow.hpp"

namespace polyflow::oracles {
namespace {

constexpr double kPi = std::numbers::pi;

template <typename F>
double integrate(F&& f, double& worst_error) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, 2.0 * kPi, 20, 1e-14, &err);
  worst_error = std::max(worst_error, err);
  return v;
}

}  // namespace

AnalyticShape AnalyticShape::circle(double r, double cx, double cy) {
  return AnalyticShape([=](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return Jet{{cx + r * c, -r * s, -r * c, r * s}, {cy + r * s, r * c, -r * s, -r * c}};
  });
}

AnalyticShape AnalyticShape::ellipse(double a, double b) {
  return AnalyticShape([=](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return Jet{{a * c, -a * s, -a * c, a * s}, {b * s, b * c, -b * s, -b * c}};
  });
}

AnalyticShape AnalyticShape::multiple_circle(double r, int turns) {
  const double m = turns;
  return AnalyticShape([=](double t) {
    const double c = std::cos(m * t), s = std::sin(m * t);
    return Jet{{r * c, -m * r * s, -m * m * r * c, m * m * m * r * s},
               {r * s, m * r * c, -m * m * r * s, -m * m * m * r * c}};
  });
}

AnalyticShape AnalyticShape::polar(std::function<std::array<double, 4>(double)> radius) {
  return AnalyticShape([radius = std::move(radius)](double t) {
    const auto [r, r1, r2, r3] = radius(t);
    const double c = std::cos(t), s = std::sin(t);
    // Leibniz rule on r(t) * (cos t, sin t).
    Jet j;
    j.x = {r * c, r1 * c - r * s, r2 * c - 2 * r1 * s - r * c,
           r3 * c - 3 * r2 * s - 3 * r1 * c + r * s};
    j.y = {r * s, r1 * s + r * c, r2 * s + 2 * r1 * c - r * s,
           r3 * s + 3 * r2 * c - 3 * r1 * s - r * c};
    return j;
  });
}

AnalyticShape AnalyticShape::perturbed_circle(double r0, double delta, int k, double phase) {
  const double kk = k;
  return polar([=](double t) {
    const double c = std::cos(kk * t + phase), s = std::sin(kk * t + phase);
    return std::array<double, 4>{r0 + delta * c, -delta * kk * s, -delta * kk * kk * c,
                                 delta * kk * kk * kk * s};
  });
}

double AnalyticShape::speed(double theta) const {
  const auto j = jet(theta);
  return std::hypot(j.x[1], j.y[1]);
}

double AnalyticShape::curvature(double theta) const {
  const auto j = jet(theta);
  const double g = std::hypot(j.x[1], j.y[1]);
  return (j.x[1] * j.y[2] - j.y[1] * j.x[2]) / (g * g * g);
}

double AnalyticShape::curvature_s(double theta) const {
  const auto j = jet(theta);
  const double g2 = j.x[1] * j.x[1] + j.y[1] * j.y[1];
  const double g = std::sqrt(g2);
  const double cr = j.x[1] * j.y[2] - j.y[1] * j.x[2];
  const double cr_t = j.x[1] * j.y[3] - j.y[1] * j.x[3];
  const double gg_t = j.x[1] * j.x[2] + j.y[1] * j.y[2];
  const double k_theta = (cr_t * g2 - 3.0 * cr * gg_t) / (g2 * g2 * g);
  return k_theta / g;
}

geometry::ClosedCurve AnalyticShape::sample(std::size_t n) const {
  return geometry::ClosedCurve::sample(n, [this](double u) {
    const auto j = jet(2.0 * kPi * u);
    return geometry::Point{j.x[0], j.y[0]};
  });
}

QuadratureFunctionals quadrature_functionals(const AnalyticShape& shape) {
  QuadratureFunctionals q;
  double& err = q.error_estimate;
  q.length = integrate([&](double t) { return shape.speed(t); }, err);
  if (!(q.length > 0.0)) throw InvalidInput("analytic shape has zero length");
  q.area = 0.5 * integrate([&](double t) {
    const auto j = shape.jet(t);
    return j.x[0] * j.y[1] - j.y[0] * j.x[1];
  }, err);
  q.total_curvature = integrate([&](double t) { return shape.curvature(t) * shape.speed(t); }, err);
  q.kappa_bar = q.total_curvature / q.length;
  q.k_osc = q.length * integrate([&](double t) {
    const double d = shape.curvature(t) - q.kappa_bar;
    return d * d * shape.speed(t);
  }, err);
  q.kappa_s_norm = integrate([&](double t) {
    const double ks = shape.curvature_s(t);
    return ks * ks * shape.speed(t);
  }, err);
  return q;
}

std::vector<double> curvature_samples(const AnalyticShape& shape, std::size_t n) {
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) {
    k[j] = shape.curvature(2.0 * kPi * static_cast<double>(j) / static_cast<double>(n));
  }
  return k;
}

double polygon_area(const geometry::ClosedCurve& curve) {
  const auto n = curve.size();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto a = curve[j], b = curve[(j + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

std::vector<double> fd_curvature(const geometry::ClosedCurve& curve) {
  const auto n = curve.size();
  const double h = 1.0 / static_cast<double>(n);
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto a = curve[(j + n - 1) % n], b = curve[j], c = curve[(j + 1) % n];
    const double xu = (c.x - a.x) / (2.0 * h), yu = (c.y - a.y) / (2.0 * h);
    const double xuu = (c.x - 2.0 * b.x + a.x) / (h * h);
    const double yuu = (c.y - 2.0 * b.y + a.y) / (h * h);
    const double g = std::hypot(xu, yu);
    k[j] = (xu * yuu - yu * xuu) / (g * g * g);
  }
  return k;
}

double linearized_mode_rate(int p, double r, int k) {
  if (p < 1) throw InvalidInput("flow order p must be >= 1");
  if (!(r > 0.0)) throw InvalidInput("radius must be positive");
  if (k < 0) throw InvalidInput("mode number must be non-negative");
  const double kk = k;
  return -std::pow(kk, 2.0 * p) * (kk * kk - 1.0) / std::pow(r, 2.0 * p + 2.0);
}

JacobianSpectrum discrete_jacobian_eigenvalues(int p, double r, std::size_t n,
                                               double relative_step) {
  const double eps = relative_step * r;
  geometry::GeometryOptions opts;
  opts.m_max = 2 * p;
  std::vector<double> theta(n);
  for (std::size_t j = 0; j < n; ++j) {
    theta[j] = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
  }
  // Outward normal speed; nu points inward on a counterclockwise circle.
  auto outward_speed = [&](std::size_t node, double bump) {
    std::vector<double> x(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double rj = r + (j == node ? bump : 0.0);
      x[j] = rj * std::cos(theta[j]);
      y[j] = rj * std::sin(theta[j]);
    }
    const geometry::ClosedCurve c(std::move(x), std::move(y));
    const auto cache = geometry::derive_geometry(c, opts);
    auto v = flow::normal_velocity(cache, p);
    for (std::size_t j = 0; j < n; ++j) {
      const double radial = cache.normal_x[j] * std::cos(theta[j]) +
                            cache.normal_y[j] * std::sin(theta[j]);
      v[j] *= radial;
    }
    return v;
  };
  Eigen::MatrixXd jac(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    const auto plus = outward_speed(col, eps);
    const auto minus = outward_speed(col, -eps);
    for (std::size_t row = 0; row < n; ++row) {
      jac(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          (plus[row] - minus[row]) / (2.0 * eps);
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
  JacobianSpectrum out;
  for (const auto& ev : solver.eigenvalues()) {
    out.real.push_back(ev.real());
    out.max_imag = std::max(out.max_imag, std::abs(ev.imag()));
  }
  std::sort(out.real.rbegin(), out.real.rend());
  return out;
}

}  // namespace polyflow::oracles
