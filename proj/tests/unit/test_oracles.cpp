#include <boost/math/special_functions/ellint_2.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "polyflow/errors.hpp"
#include "polyflow/oracles.hpp"
#include "polyflow/verification.hpp"

using namespace polyflow;
using namespace polyflow::oracles;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("quadrature reproduces closed forms") {
  const auto q = quadrature_functionals(AnalyticShape::circle(2.0));
  CHECK(q.length == doctest::Approx(4 * kPi).epsilon(1e-13));
  CHECK(q.area == doctest::Approx(4 * kPi).epsilon(1e-13));
  CHECK(q.kappa_bar == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(q.k_osc < 1e-20);
  // Ellipse perimeter 4 a E(e).
  const double a = 2.0, b = 1.0;
  const auto e = quadrature_functionals(AnalyticShape::ellipse(a, b));
  CHECK(e.length == doctest::Approx(4 * a * boost::math::ellint_2(std::sqrt(1 - b * b / (a * a)))).epsilon(1e-13));
  CHECK(e.area == doctest::Approx(kPi * a * b).epsilon(1e-13));
  CHECK(e.total_curvature == doctest::Approx(2 * kPi).epsilon(1e-12));
}

TEST_CASE("polar jets agree with finite differences of the position") {
  const auto s = AnalyticShape::perturbed_circle(1.0, 0.2, 3, 0.5);
  const double t = 0.8, h = 1e-5;
  const auto j = s.jet(t), jp = s.jet(t + h), jm = s.jet(t - h);
  for (int d = 0; d < 3; ++d) {
    CHECK((jp.x[d] - jm.x[d]) / (2 * h) == doctest::Approx(j.x[d + 1]).epsilon(1e-8));
    CHECK((jp.y[d] - jm.y[d]) / (2 * h) == doctest::Approx(j.y[d + 1]).epsilon(1e-8));
  }
  CHECK((s.curvature(t + h) - s.curvature(t - h)) / (2 * h * s.speed(t)) ==
        doctest::Approx(s.curvature_s(t)).epsilon(1e-7));
}

TEST_CASE("polar curvature formula (r^2 + 2r'^2 - r r'') / (r^2 + r'^2)^{3/2}") {
  for (double d : {0.1, 0.12, 0.15, 0.25}) {
    const auto s = AnalyticShape::perturbed_circle(1.0, d, 2);
    for (double t : {0.0, 0.4, kPi / 2}) {
      const double r = 1 + d * std::cos(2 * t), r1 = -2 * d * std::sin(2 * t), r2 = -4 * d * std::cos(2 * t);
      CHECK(s.curvature(t) == doctest::Approx((r * r + 2 * r1 * r1 - r * r2) / std::pow(r * r + r1 * r1, 1.5)));
    }
  }
}

TEST_CASE("mode-2 polar perturbations lose convexity only above delta = 1/5") {
  // min kappa sits at theta = pi/2: (1 - 5 delta) / (1 - delta)^2.
  for (double d : {0.10, 0.12, 0.15, 0.19}) {
    double lo = 1e300;
    for (double k : curvature_samples(AnalyticShape::perturbed_circle(1.0, d, 2), 2048)) lo = std::min(lo, k);
    CHECK(lo > 0);
    CHECK(lo == doctest::Approx((1 - 5 * d) / ((1 - d) * (1 - d))).epsilon(1e-9));
  }
  double lo = 1e300;
  for (double k : curvature_samples(AnalyticShape::perturbed_circle(1.0, 0.016, 8), 2048)) lo = std::min(lo, k);
  CHECK(lo < 0);
}

TEST_CASE("shoelace and finite-difference curvature are second order") {
  // Unit square traversed counterclockwise, four nodes per side.
  std::vector<double> x, y;
  for (int i = 0; i < 4; ++i) { x.push_back(i / 4.0); y.push_back(0); }
  for (int i = 0; i < 4; ++i) { x.push_back(1); y.push_back(i / 4.0); }
  for (int i = 0; i < 4; ++i) { x.push_back(1 - i / 4.0); y.push_back(1); }
  for (int i = 0; i < 4; ++i) { x.push_back(0); y.push_back(1 - i / 4.0); }
  CHECK(polygon_area(geometry::ClosedCurve(x, y)) == doctest::Approx(1.0));
  const auto c = AnalyticShape::circle(1.0);
  const double e1 = std::abs(polygon_area(c.sample(64)) - kPi);
  const double e2 = std::abs(polygon_area(c.sample(128)) - kPi);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(1e-2));
  auto fd_error = [](std::size_t n) {
    double e = 0.0;
    for (double k : fd_curvature(AnalyticShape::circle(2.0).sample(n))) e = std::max(e, std::abs(k - 0.5));
    return e;
  };
  CHECK(fd_error(64) < 2e-3);
  CHECK(fd_error(64) / fd_error(128) == doctest::Approx(4.0).epsilon(1e-2));
}

TEST_CASE("linearized mode rates") {
  CHECK(linearized_mode_rate(1, 1.0, 2) == -12.0);
  CHECK(linearized_mode_rate(1, 1.0, 3) == -72.0);
  CHECK(linearized_mode_rate(2, 1.0, 2) == -48.0);
  CHECK(linearized_mode_rate(1, 2.0, 2) == doctest::Approx(-12.0 / 16));
  CHECK(linearized_mode_rate(1, 1.0, 1) == 0.0);
  CHECK_THROWS_AS(linearized_mode_rate(0, 1.0, 2), InvalidInput);
}

TEST_CASE("discrete Jacobian at the circle matches the linearization") {
  for (const auto& r : verification::jacobian_battery(1, 1.5, 64)) CHECK_MESSAGE(r.passed, r.quantity);
}

TEST_CASE("oracle battery is green at N = 128") {
  for (const auto& r : verification::oracle_battery(128)) CHECK_MESSAGE(r.passed, std::string(r.shape + " " + r.quantity));
}
