#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "polyflow/errors.hpp"
#include "polyflow/inequality.hpp"
#include "polyflow/oracles.hpp"
#include "polyflow/verification.hpp"

using namespace polyflow;
using namespace polyflow::inequality;
using spectral::PeriodicSamples;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("Wirtinger: equality exactly on the first harmonic") {
  for (double P : {1.0, 2 * kPi, 17.3}) {
    const auto f = PeriodicSamples::sample(64, [](double u) { return 0.3 * std::sin(2 * kPi * u + 1.1); });
    const auto w = wirtinger_check(f, P);
    CHECK(w.holds);
    CHECK(w.equality);
    CHECK(w.bound == doctest::Approx(P * P / (4 * kPi * kPi)));
    CHECK(std::abs(w.ratio - w.bound) / w.bound < 1e-12);
  }
}

TEST_CASE("Wirtinger: higher harmonics are strict") {
  const auto f = PeriodicSamples::sample(64, [](double u) { return std::cos(2 * kPi * 3 * u); });
  const auto w = wirtinger_check(f, 1.0);
  CHECK(w.holds);
  CHECK_FALSE(w.equality);
  CHECK(w.ratio == doctest::Approx(w.bound / 9));
}

TEST_CASE("Wirtinger: the mean is removed, constants are degenerate") {
  const auto f = PeriodicSamples::sample(32, [](double u) { return 5.0 + std::cos(2 * kPi * u); });
  const auto w = wirtinger_check(f, 1.0);
  CHECK(w.centered);
  CHECK(w.removed_mean == doctest::Approx(5.0));
  CHECK(w.equality);
  const auto c = wirtinger_check(PeriodicSamples(std::vector<double>(32, 2.0)), 1.0);
  CHECK(c.degenerate);
  CHECK(c.holds);
}

TEST_CASE("sup bound: max f^2 <= (P/2pi) int f'^2") {
  const auto f = PeriodicSamples::sample(64, [](double u) { return std::sin(2 * kPi * u) + 0.2 * std::sin(2 * kPi * 4 * u); });
  for (double P : {1.0, 3.0}) {
    const auto s = sup_bound_check(f, P);
    CHECK(s.holds);
    CHECK(s.sup_squared <= s.bound);
  }
}

TEST_CASE("random suites: zero violations and no spurious equality") {
  for (double P : {1.0, 2 * kPi, 17.3}) {
    const auto s = verification::run_inequality_suite(P, 200, 11);
    CHECK(s.wirtinger_violations == 0);
    CHECK(s.sup_violations == 0);
    CHECK(s.false_equalities == 0);
    CHECK(s.worst_wirtinger_ratio <= 1.0 + 1e-12);
    CHECK(s.passed());
  }
}

TEST_CASE("iterated interpolation holds on an ellipse for every eps") {
  const auto c = geometry::derive_geometry(oracles::AnalyticShape::ellipse(1.5, 1.0).sample(256), 5);
  const std::vector<double> eps{1e-2, 1e-1, 1.0};
  for (int m = 1; m <= 4; ++m) {
    for (const auto& v : iterated_interp_check(c, m, eps)) {
      CHECK(v.holds);
      CHECK(v.lhs <= v.rhs);
    }
  }
  CHECK_THROWS_AS(iterated_interp_check(c, 0, eps), InvalidInput);
  CHECK_THROWS_AS(iterated_interp_check(c, 5, eps), InvalidInput);
}

TEST_CASE("P-term norms reduce to the closed forms") {
  const auto c = geometry::derive_geometry(oracles::AnalyticShape::perturbed_circle(1.0, 0.1, 3).sample(256), 3);
  // A single zero-order factor is int |phi| ds; two of them int phi^2 ds = K_osc / L.
  const std::vector<int> two{0, 0};
  CHECK(p_term_norm(c, two) == doctest::Approx(c.k_osc / c.length).epsilon(1e-12));
  const std::vector<int> d1{1, 1};
  CHECK(p_term_norm(c, d1) == doctest::Approx(c.deriv_norms[1]).epsilon(1e-12));
  CHECK(k2_norm(c, 0) == doctest::Approx(std::sqrt(c.k_osc)).epsilon(1e-12));
  CHECK(k2_norm(c, 1) > k2_norm(c, 0));
}
