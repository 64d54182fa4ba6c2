#include "polyflow/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "polyflow/errors.hpp"

namespace polyflow::inequality {
namespace {

constexpr double kPi = std::numbers::pi;

struct Centered {
  std::vector<double> values;
  double mean = 0.0;
  bool shifted = false;
};

Centered center(const spectral::PeriodicSamples& f) {
  Centered c;
  c.values.assign(f.values().begin(), f.values().end());
  c.mean = spectral::mean(c.values);
  if (std::abs(c.mean) > 1e-12) {
    for (auto& v : c.values) v -= c.mean;
    c.shifted = true;
  }
  return c;
}

void require_period(double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw InvalidInput("period must be positive and finite");
  }
}

double mean_square(std::span<const double> f) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return s / static_cast<double>(f.size());
}

// phi_{s^j}: kappa - kappa_bar for j = 0, kappa_{s^j} otherwise.
std::vector<double> phi_derivative(const geometry::GeometryCache& cache, int j) {
  const auto k = cache.kappa_s(j);
  std::vector<double> out(k.begin(), k.end());
  if (j == 0) {
    for (auto& v : out) v -= cache.kappa_bar;
  }
  return out;
}

}  // namespace

WirtingerResult wirtinger_check(const spectral::PeriodicSamples& f, double period) {
  require_period(period);
  const auto c = center(f);
  WirtingerResult r;
  r.centered = c.shifted;
  r.removed_mean = c.mean;
  r.bound = period * period / (4.0 * kPi * kPi);
  const double f2 = mean_square(c.values);
  const double fx2 = mean_square(spectral::differentiate(c.values, 1, period));
  if (fx2 == 0.0 || f2 == 0.0) {
    r.degenerate = true;
    r.holds = true;
    return r;
  }
  r.ratio = f2 / fx2;
  r.holds = r.ratio <= r.bound + 1e-12 * period * period;
  r.equality = std::abs(r.ratio - r.bound) <= 1e-10 * r.bound;
  return r;
}

SupBoundResult sup_bound_check(const spectral::PeriodicSamples& f, double period) {
  require_period(period);
  const auto c = center(f);
  SupBoundResult r;
  r.centered = c.shifted;
  const auto fine = spectral::refine(c.values, 8 * c.values.size());
  for (double v : fine) r.sup_squared = std::max(r.sup_squared, v * v);
  const double fx2 = mean_square(spectral::differentiate(c.values, 1, period));
  r.bound = period / (2.0 * kPi) * period * fx2;
  const double scale = std::max({r.bound, r.sup_squared, 1e-300});
  r.holds = r.sup_squared <= r.bound + 1e-12 * scale;
  return r;
}

std::vector<InterpolationVerdict> iterated_interp_check(const geometry::GeometryCache& cache,
                                                        int m,
                                                        std::span<const double> eps_grid) {
  if (m < 1) throw InvalidInput("interpolation check needs m >= 1");
  if (m + 1 > cache.m_max()) {
    throw InvalidInput("interpolation check at m = " + std::to_string(m) +
                       " needs curvature derivatives up to order " + std::to_string(m + 1));
  }
  const double len = cache.length;
  const double lhs = cache.deriv_norms[static_cast<std::size_t>(m)];
  const double next = cache.deriv_norms[static_cast<std::size_t>(m + 1)];
  const double tail = std::pow(len, -(2.0 * m + 1.0)) * cache.k_osc;
  std::vector<InterpolationVerdict> out;
  for (double eps : eps_grid) {
    if (!(eps > 0.0)) throw InvalidInput("interpolation check needs eps > 0");
    InterpolationVerdict v;
    v.epsilon = eps;
    v.lhs = lhs;
    const double a = eps * len * len * next;
    const double b = tail / (4.0 * std::pow(eps, m));
    v.rhs = a + b;
    const double scale = std::max({lhs, a, b});
    v.holds = v.lhs <= v.rhs + 1e-10 * scale;
    out.push_back(v);
  }
  return out;
}

double p_term_norm(const geometry::GeometryCache& cache, std::span<const int> partition) {
  if (partition.empty()) throw InvalidInput("p-term needs at least one factor");
  std::vector<double> prod(cache.size(), 1.0);
  for (int mu : partition) {
    if (mu < 0) throw InvalidInput("p-term derivative orders must be non-negative");
    const auto f = phi_derivative(cache, mu);
    for (std::size_t j = 0; j < prod.size(); ++j) prod[j] *= f[j];
  }
  for (auto& v : prod) v = std::abs(v);
  return cache.integral(prod);
}

double k2_norm(const geometry::GeometryCache& cache, int order) {
  if (order < 0) throw InvalidInput("norm order must be non-negative");
  double sum = 0.0;
  for (int j = 0; j <= order; ++j) {
    auto f = phi_derivative(cache, j);
    for (auto& v : f) v *= v;
    sum += std::pow(cache.length, j + 0.5) * std::sqrt(cache.integral(f));
  }
  return sum;
}

}  // namespace polyflow::inequality
