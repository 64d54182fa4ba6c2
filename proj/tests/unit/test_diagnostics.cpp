#include <cmath>
#include <numbers>

#include "doctest.h"
#include "polyflow/diagnostics.hpp"
#include "polyflow/errors.hpp"
#include "polyflow/oracles.hpp"

using namespace polyflow;
using namespace polyflow::diagnostics;
using oracles::AnalyticShape;

namespace {
constexpr double kPi = std::numbers::pi;

DiagnosticsRecord rec(double t, double L, double Dp, double kmin = 1.0) {
  DiagnosticsRecord r;
  r.t = t;
  r.length = L;
  r.dissipation = Dp;
  r.min_kappa = kmin;
  r.area = kPi;
  r.iso_ratio = 1.0;
  r.omega = 1;
  return r;
}
}  // namespace

TEST_CASE("oscillation identity holds on smooth curves with the 3 kappa_bar term") {
  for (int p : {1, 2}) {
    for (const auto& shape : {AnalyticShape::ellipse(1.3, 1.0), AnalyticShape::perturbed_circle(1.0, 0.1, 3)}) {
      const auto c = geometry::derive_geometry(shape.sample(256), 2 * p + 2);
      const auto id = kosc_identity(c, p);
      CHECK(id.normalized() < 1e-10);
      CHECK(kosc_identity_residual(c, p) == id.normalized());
      // The printed single kappa_bar coefficient does not balance.
      CHECK(kosc_identity(c, p, 1.0).normalized() > 1e-3);
    }
  }
}

TEST_CASE("predicted rates at the circle vanish") {
  const auto c = geometry::derive_geometry(AnalyticShape::circle(2.0).sample(64), 4);
  const auto r = predicted_rates(c, 1);
  CHECK(std::abs(r.length) < 1e-20);
  CHECK(std::abs(r.kappa_bar) < 1e-20);
}

TEST_CASE("exponential fit recovers the rate") {
  std::vector<double> t, y;
  for (int i = 0; i < 50; ++i) {
    t.push_back(0.01 * i);
    y.push_back(3.0 * std::exp(-12.0 * t.back()));
  }
  const auto f = fit_exponential_rate(t, y, 0.0, 1.0);
  CHECK(f.rate == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(f.samples == 50);
  CHECK(fit_exponential_tail(t, y).rate == doctest::Approx(12.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_exponential_rate(t, y, 0.0, 0.05), InvalidInput);
  y[3] = 0.0;
  CHECK_THROWS_AS(fit_exponential_rate(t, y, 0.0, 1.0), InvalidInput);
}

TEST_CASE("waiting-time bound formula and measurement") {
  // Bound vanishes on the circle.
  CHECK(waiting_time_bound(2 * kPi, kPi, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(waiting_time_bound(2 * kPi * 1.1, kPi, 2) ==
        doctest::Approx((2.0 / 3.0) * (std::pow(1.1, 6) - 1.0)));
  std::vector<DiagnosticsRecord> s;
  for (int i = 0; i <= 100; ++i) s.push_back(rec(1e-4 * i, 2 * kPi * 1.01, 1.0, i < 30 ? -0.1 : 0.5));
  const auto w = waiting_time(s, 1);
  // Nonconvex records 0..29 plus the interval to the first convex one.
  CHECK(w.measured == doctest::Approx(30e-4).epsilon(1e-9));
  CHECK(w.convex_after_waiting);
  CHECK(w.verdict.passed);
  s[80].min_kappa = -0.2;
  CHECK_FALSE(waiting_time(s, 1).convex_after_waiting);
}

TEST_CASE("length rate identity on an exact exponential series") {
  std::vector<DiagnosticsRecord> s;
  for (int i = 0; i < 40; ++i) {
    const double t = 1e-3 * i * (1 + 0.01 * i);
    // L = 1 + e^{-t}, dL/dt = -e^{-t} = -D_p
    s.push_back(rec(t, 1.0 + std::exp(-t), std::exp(-t)));
  }
  const auto r = length_rate_identity(s);
  CHECK(r.evaluated == 38);
  CHECK(r.max_relative_error < 1e-5);
}

TEST_CASE("mode amplitude, best-fit circle and sup deviation") {
  const auto curve = AnalyticShape::perturbed_circle(1.0, 0.01, 3, 0.4).sample(256).translated(0.3, -0.2);
  CHECK(mode_amplitude(curve, 3) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(mode_amplitude(curve, 5) < 1e-5);
  const auto circ = AnalyticShape::circle(2.0, 1.0, 1.0).sample(128);
  const auto c = best_fit_circle(circ);
  CHECK(c.cx == doctest::Approx(1.0));
  CHECK(c.r == doctest::Approx(2.0));
  CHECK(max_distance_to_circle(circ, c) < 1e-14);
  const auto g = geometry::derive_geometry(AnalyticShape::ellipse(2, 1).sample(256), 2);
  const auto sd = sup_deviation(g);
  CHECK(sd.holds);
  CHECK(sd.value <= sd.bound);
}

TEST_CASE("a-priori bound and decay floor") {
  CHECK(decay_rate_floor(2 * kPi, 1) == doctest::Approx(1.0));
  CHECK(decay_rate_floor(4 * kPi, 2) == doctest::Approx(1.0 / 64));
  std::vector<DiagnosticsRecord> s{rec(0, 1, 1), rec(1, 1, 1)};
  s[0].k_osc = 2.0;
  s[1].k_osc = 2.0 + 4 * kPi * kPi * std::log(1.01) - 1e-3;
  CHECK(kosc_bound_check(s, 2.0, 1.01, 1).passed);
  s[1].k_osc += 2e-3;
  CHECK_FALSE(kosc_bound_check(s, 2.0, 1.01, 1).passed);
}

TEST_CASE("make_record collects the tracked functionals") {
  const auto curve = AnalyticShape::ellipse(1.2, 1.0).sample(128);
  const auto c = geometry::derive_geometry(curve, 4);
  RecordOptions opt;
  opt.multiplicity = opt.interpolation = true;
  const auto r = make_record(0.5, curve, c, 1, opt);
  CHECK(r.t == 0.5);
  CHECK(r.dissipation == c.deriv_norms[1]);
  CHECK(r.multiplicity.value() == 1);
  CHECK(r.interpolation_holds.value());
  CHECK(r.kosc_residual < 1e-10);
}
