#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "polyflow/errors.hpp"
#include "polyflow/spectral.hpp"

using namespace polyflow;
using namespace polyflow::spectral;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> grid(std::size_t n, auto f) {
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = f(static_cast<double>(j) / static_cast<double>(n));
  return v;
}

double max_err(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}
}  // namespace

TEST_CASE("PeriodicSamples rejects short, odd and non-finite input") {
  CHECK_THROWS_AS(PeriodicSamples(std::vector<double>(8, 0.0)), InvalidInput);
  CHECK_THROWS_AS(PeriodicSamples(std::vector<double>(17, 0.0)), InvalidInput);
  std::vector<double> v(16, 0.0);
  v[3] = std::nan("");
  CHECK_THROWS_AS(PeriodicSamples{v}, InvalidInput);
  CHECK_NOTHROW(PeriodicSamples(std::vector<double>(16, 1.0)));
}

TEST_CASE("derivatives of trigonometric polynomials are exact to round-off") {
  const auto f = grid(64, [](double u) { return std::sin(2 * kPi * 3 * u) + 0.5 * std::cos(2 * kPi * 7 * u); });
  const auto d1 = differentiate(f, 1);
  const auto d2 = differentiate(f, 2);
  const auto e1 = grid(64, [](double u) {
    return 6 * kPi * std::cos(6 * kPi * u) - 7 * kPi * std::sin(14 * kPi * u);
  });
  const auto e2 = grid(64, [](double u) {
    return -36 * kPi * kPi * std::sin(6 * kPi * u) - 0.5 * 196 * kPi * kPi * std::cos(14 * kPi * u);
  });
  CHECK(max_err(d1, e1) < 1e-11);
  CHECK(max_err(d2, e2) < 1e-9);
}

TEST_CASE("period rescales derivatives") {
  const double P = 3.7;
  const auto f = grid(32, [](double u) { return std::cos(2 * kPi * u); });
  const auto d = differentiate(f, 1, P);
  const auto e = grid(32, [&](double u) { return -2 * kPi / P * std::sin(2 * kPi * u); });
  CHECK(max_err(d, e) < 1e-13);
}

TEST_CASE("the Nyquist mode has no odd derivative and is removable") {
  const auto f = grid(16, [](double u) { return std::cos(kPi * 16 * u); });
  for (double v : differentiate(f, 1)) CHECK(std::abs(v) < 1e-12);
  for (double v : without_nyquist(f)) CHECK(std::abs(v) < 1e-15);
  CHECK(spectral_energy(f) == doctest::Approx(1.0));
}

TEST_CASE("antiderivative inverts differentiate up to the mean") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> c(10);
  for (auto& x : c) x = g(rng);
  const auto f = grid(64, [&](double u) {
    double s = c[0];
    for (int k = 1; k < 5; ++k) s += c[2 * k] * std::cos(2 * kPi * k * u) + c[2 * k + 1] * std::sin(2 * kPi * k * u);
    return s;
  });
  const auto F = antiderivative(f);
  CHECK(std::abs(mean(F)) < 1e-14);
  const auto back = differentiate(F, 1);
  for (std::size_t j = 0; j < f.size(); ++j) CHECK(back[j] == doctest::Approx(f[j] - c[0]).epsilon(1e-12));
}

TEST_CASE("integrate and Parseval agree for band-limited products") {
  const auto f = grid(32, [](double u) { return 1.0 + std::sin(2 * kPi * u); });
  const std::vector<double> one(32, 1.0);
  CHECK(integrate(f, one) == doctest::Approx(1.0));
  CHECK(integrate(f, f) == doctest::Approx(1.5));
  CHECK(spectral_energy(f) == doctest::Approx(1.5));
}

TEST_CASE("refine then restrict is the identity; interpolate matches the closed form") {
  const auto f = grid(32, [](double u) { return std::exp(std::sin(2 * kPi * u)) * 0.0 + std::sin(2 * kPi * 5 * u + 0.3); });
  const auto fine = refine(f, 128);
  const auto e = grid(128, [](double u) { return std::sin(2 * kPi * 5 * u + 0.3); });
  CHECK(max_err(fine, e) < 1e-13);
  CHECK(max_err(restrict_to(fine, 32), f) < 1e-14);
  const std::vector<double> at{0.013, 0.5, 0.917};
  const auto v = interpolate(f, at);
  for (std::size_t i = 0; i < at.size(); ++i) CHECK(v[i] == doctest::Approx(std::sin(2 * kPi * 5 * at[i] + 0.3)));
}

TEST_CASE("dealiased products keep the low modes exact") {
  // sin(2 pi 10 u)^2 = 1/2 - cos(2 pi 20 u)/2: mode 20 does not fit on 32 points.
  const auto f = grid(32, [](double u) { return std::sin(2 * kPi * 10 * u); });
  const auto p = product(f, f, true);
  CHECK(mean(p) == doctest::Approx(0.5));
  for (double v : p) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  const auto q = product(f, f, false);
  CHECK(max_err(q, grid(32, [](double u) { return std::pow(std::sin(2 * kPi * 10 * u), 2); })) < 1e-14);
}

TEST_CASE("Spectrum round trip, filter and evaluate") {
  const auto f = grid(16, [](double u) { return 2.0 + 1e-15 * std::cos(2 * kPi * 3 * u) + std::sin(2 * kPi * u); });
  auto s = Spectrum::of(f);
  CHECK(max_err(s.samples(), f) < 1e-15);
  CHECK(s.max_oscillatory_magnitude() == doctest::Approx(0.5));
  CHECK(s.drop_below(1e-13) >= 1);
  CHECK(s.coefficients()[3] == spectral::Complex(0.0));
  CHECK(s.evaluate(0.25) == doctest::Approx(3.0));
}

TEST_CASE("resample along a monotone parameter") {
  const auto f = PeriodicSamples::sample(32, [](double u) { return std::cos(2 * kPi * u); });
  const auto par = PeriodicSamples::sample(32, [](double u) { return u + 0.05 * std::sin(2 * kPi * u); });
  const auto r = resample(f, par);
  for (std::size_t j = 0; j < 32; ++j) CHECK(r[j] == doctest::Approx(std::cos(2 * kPi * par[j])).epsilon(1e-12));
  const auto d = spectral_derivative(f, 1);
  CHECK(d[8] == doctest::Approx(-2 * kPi));
  CHECK(periodic_integral(f, f) == doctest::Approx(0.5));
}
