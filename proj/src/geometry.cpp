#include "polyflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "polyflow/errors.hpp"
#include "polyflow/spectral.hpp"

namespace polyflow::geometry {

using spectral::Spectrum;

namespace {

constexpr double kPi = std::numbers::pi;

// Scale used to decide what counts as round-off in a field's spectrum: the
// larger of its mean and its largest oscillatory coefficient.
double spectral_scale(const Spectrum& s) {
  return std::max(std::abs(s.coefficients()[0]), s.max_oscillatory_magnitude());
}

struct Vec {
  double x, y;
};
Vec operator-(Vec a, Vec b) { return {a.x - b.x, a.y - b.y}; }
Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
Vec operator*(double t, Vec a) { return {t * a.x, t * a.y}; }
double cross(Vec a, Vec b) { return a.x * b.y - a.y * b.x; }
double dot(Vec a, Vec b) { return a.x * b.x + a.y * b.y; }
double norm(Vec a) { return std::hypot(a.x, a.y); }

struct Hit {
  Vec at;
  std::size_t i, j;
};

// Appends the intersection points of segments [p, p+r] and [q, q+s].
// Collinear overlaps contribute both ends of the overlap.
void intersect(Vec p, Vec r, Vec q, Vec s, std::size_t i, std::size_t j,
               std::vector<Hit>& hits) {
  constexpr double kParam = 1e-9;
  constexpr double kParallel = 1e-12;
  const double rr = dot(r, r);
  const double ss = dot(s, s);
  if (rr == 0.0 || ss == 0.0) return;
  const double denom = cross(r, s);
  const Vec qp = q - p;
  if (std::abs(denom) <= kParallel * std::sqrt(rr * ss)) {
    if (std::abs(cross(qp, r)) > kParallel * rr + kParallel * norm(qp) * std::sqrt(rr)) {
      return;
    }
    const double t0 = dot(qp, r) / rr;
    const double t1 = t0 + dot(s, r) / rr;
    const double lo = std::max(0.0, std::min(t0, t1));
    const double hi = std::min(1.0, std::max(t0, t1));
    if (lo > hi + kParam) return;
    hits.push_back({p + lo * r, i, j});
    if (hi > lo) hits.push_back({p + hi * r, i, j});
    return;
  }
  const double t = cross(qp, s) / denom;
  const double u = cross(qp, r) / denom;
  if (t < -kParam || t > 1.0 + kParam || u < -kParam || u > 1.0 + kParam) return;
  hits.push_back({p + t * r, i, j});
}

std::size_t find(std::vector<std::size_t>& parent, std::size_t a) {
  while (parent[a] != a) a = parent[a] = parent[parent[a]];
  return a;
}

// Number of maximal runs of cyclically consecutive indices in a sorted set.
int count_runs(const std::vector<std::size_t>& sorted, std::size_t n) {
  if (sorted.empty()) return 0;
  if (sorted.size() == n) return 1;
  int runs = 0;
  for (std::size_t a = 0; a < sorted.size(); ++a) {
    const std::size_t prev = (sorted[a] + n - 1) % n;
    if (!std::binary_search(sorted.begin(), sorted.end(), prev)) ++runs;
  }
  return runs;
}

}  // namespace

// ---------------------------------------------------------------------------

ClosedCurve::ClosedCurve(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) {
    throw InvalidInput("closed curve: coordinate lengths differ (" +
                       std::to_string(x_.size()) + " vs " + std::to_string(y_.size()) + ")");
  }
  if (x_.size() < kMinSize || x_.size() % 2 != 0) {
    throw InvalidInput("closed curve: need an even number of samples >= 16, got " +
                       std::to_string(x_.size()));
  }
  for (std::size_t j = 0; j < x_.size(); ++j) {
    if (!std::isfinite(x_[j]) || !std::isfinite(y_[j])) {
      throw InvalidInput("closed curve: non-finite coordinate at node " + std::to_string(j));
    }
  }
}

ClosedCurve ClosedCurve::scaled(double factor) const {
  auto x = x_, y = y_;
  for (auto& v : x) v *= factor;
  for (auto& v : y) v *= factor;
  return {std::move(x), std::move(y)};
}

ClosedCurve ClosedCurve::translated(double dx, double dy) const {
  auto x = x_, y = y_;
  for (auto& v : x) v += dx;
  for (auto& v : y) v += dy;
  return {std::move(x), std::move(y)};
}

ClosedCurve ClosedCurve::rotated(double angle) const {
  const double c = std::cos(angle), s = std::sin(angle);
  std::vector<double> x(size()), y(size());
  for (std::size_t j = 0; j < size(); ++j) {
    x[j] = c * x_[j] - s * y_[j];
    y[j] = s * x_[j] + c * y_[j];
  }
  return {std::move(x), std::move(y)};
}

ClosedCurve ClosedCurve::reversed() const {
  const auto n = size();
  std::vector<double> x(n), y(n);
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = x_[(n - j) % n];
    y[j] = y_[(n - j) % n];
  }
  return {std::move(x), std::move(y)};
}

// ---------------------------------------------------------------------------

std::span<const double> GeometryCache::kappa_s(int m) const {
  if (m < 0 || m > m_max()) {
    throw InvalidInput("curvature derivative of order " + std::to_string(m) +
                       " requested, cache holds up to " + std::to_string(m_max()));
  }
  return kappa_derivs[static_cast<std::size_t>(m)];
}

double GeometryCache::min_kappa() const noexcept {
  const auto k = kappa();
  return *std::min_element(k.begin(), k.end());
}

double GeometryCache::max_abs_kappa() const noexcept {
  double m = 0.0;
  for (double v : kappa()) m = std::max(m, std::abs(v));
  return m;
}

double GeometryCache::integral(std::span<const double> f) const {
  return spectral::integrate(f, ds_weight);
}

GeometryCache derive_geometry(const ClosedCurve& curve, const GeometryOptions& options) {
  if (options.m_max < 0) throw InvalidInput("m_max must be non-negative");
  const auto n = curve.size();

  // The Nyquist cosine has no derivative on the grid, so the geometry of a
  // sampled curve cannot depend on it.
  auto sx = Spectrum::of(curve.x());
  auto sy = Spectrum::of(curve.y());
  sx.drop_nyquist();
  sy.drop_nyquist();
  if (options.filter_tolerance > 0.0) {
    const double cut = options.filter_tolerance *
                       std::max(sx.max_oscillatory_magnitude(), sy.max_oscillatory_magnitude());
    sx.drop_below(cut);
    sy.drop_below(cut);
  }
  const auto xu = sx.derivative(1).samples();
  const auto yu = sy.derivative(1).samples();
  const auto xuu = sx.derivative(2).samples();
  const auto yuu = sy.derivative(2).samples();

  GeometryCache c;
  c.ds_weight.resize(n);
  for (std::size_t j = 0; j < n; ++j) c.ds_weight[j] = std::hypot(xu[j], yu[j]);
  const double g_mean = spectral::mean(c.ds_weight);
  const auto g_min_it = std::min_element(c.ds_weight.begin(), c.ds_weight.end());
  if (!(g_mean > 0.0) || !std::isfinite(g_mean) ||
      *g_min_it <= options.regularity_tolerance * g_mean) {
    throw DegenerateParametrization(
        "|gamma_u| = " + std::to_string(*g_min_it) + " at node " +
        std::to_string(g_min_it - c.ds_weight.begin()) + " (mean " + std::to_string(g_mean) + ")");
  }

  c.tangent_x.resize(n);
  c.tangent_y.resize(n);
  c.normal_x.resize(n);
  c.normal_y.resize(n);
  std::vector<double> kappa(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double g = c.ds_weight[j];
    c.tangent_x[j] = xu[j] / g;
    c.tangent_y[j] = yu[j] / g;
    c.normal_x[j] = -c.tangent_y[j];
    c.normal_y[j] = c.tangent_x[j];
    kappa[j] = (xu[j] * yuu[j] - yu[j] * xuu[j]) / (g * g * g);
  }

  const auto m_max = static_cast<std::size_t>(options.m_max);
  c.kappa_derivs.resize(m_max + 1);
  c.kappa_derivs[0] = std::move(kappa);
  for (std::size_t m = 0; m <= m_max; ++m) {
    auto spec = Spectrum::of(c.kappa_derivs[m]);
    if (options.filter_tolerance > 0.0) {
      spec.drop_below(options.filter_tolerance * spectral_scale(spec));
    }
    if (m == 0) {
      spec.drop_nyquist();
      c.kappa_derivs[0] = spec.samples();
    }
    if (m == m_max) break;
    auto next = spec.derivative(1).samples();
    for (std::size_t j = 0; j < n; ++j) next[j] /= c.ds_weight[j];
    c.kappa_derivs[m + 1] = std::move(next);
  }

  c.length = g_mean;
  double twice_area = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    twice_area += curve.x()[j] * yu[j] - curve.y()[j] * xu[j];
  }
  c.area = 0.5 * twice_area / static_cast<double>(n);
  c.iso_ratio = c.area > 0.0 ? c.length * c.length / (4.0 * kPi * c.area)
                             : std::numeric_limits<double>::infinity();

  const auto k = c.kappa();
  const double total_curvature = c.integral(k);
  const double turns = total_curvature / (2.0 * kPi);
  c.omega = static_cast<int>(std::lround(turns));
  c.omega_residual = turns - c.omega;
  c.kappa_bar = total_curvature / c.length;

  std::vector<double> dev(n);
  for (std::size_t j = 0; j < n; ++j) dev[j] = (k[j] - c.kappa_bar) * (k[j] - c.kappa_bar);
  c.k_osc = c.length * c.integral(dev);

  c.deriv_norms.resize(m_max + 1);
  std::vector<double> sq(n);
  for (std::size_t m = 0; m <= m_max; ++m) {
    const auto& f = c.kappa_derivs[m];
    for (std::size_t j = 0; j < n; ++j) sq[j] = f[j] * f[j];
    c.deriv_norms[m] = c.integral(sq);
  }
  return c;
}

std::vector<double> arclength_derivative(const GeometryCache& cache,
                                         std::span<const double> f, int order,
                                         double filter_tolerance) {
  if (order < 0) throw InvalidInput("derivative order must be non-negative");
  if (f.size() != cache.size()) throw InvalidInput("arclength derivative: size mismatch");
  std::vector<double> cur(f.begin(), f.end());
  for (int m = 0; m < order; ++m) {
    auto spec = Spectrum::of(cur);
    if (filter_tolerance > 0.0) spec.drop_below(filter_tolerance * spectral_scale(spec));
    cur = spec.derivative(1).samples();
    for (std::size_t j = 0; j < cur.size(); ++j) cur[j] /= cache.ds_weight[j];
  }
  return cur;
}

WindingNumber winding_number(const GeometryCache& cache) {
  if (std::abs(cache.omega_residual) > 1e-3) {
    throw UnderResolved("total curvature / 2pi is " +
                        std::to_string(cache.omega + cache.omega_residual) +
                        ", not within 1e-3 of an integer");
  }
  return {cache.omega, cache.omega_residual};
}

Multiplicity max_multiplicity(const ClosedCurve& curve) {
  const auto n = curve.size();
  std::vector<Vec> pt(n);
  double length = 0.0;
  for (std::size_t j = 0; j < n; ++j) pt[j] = {curve.x()[j], curve.y()[j]};
  for (std::size_t j = 0; j < n; ++j) length += norm(pt[(j + 1) % n] - pt[j]);
  const double dx = length / (10.0 * static_cast<double>(n));

  std::vector<Hit> hits;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec p = pt[i], r = pt[(i + 1) % n] - p;
    const double pxlo = std::min(p.x, p.x + r.x), pxhi = std::max(p.x, p.x + r.x);
    const double pylo = std::min(p.y, p.y + r.y), pyhi = std::max(p.y, p.y + r.y);
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the wrap
      const Vec q = pt[j], s = pt[(j + 1) % n] - q;
      const double pad = 1e-12 * (1.0 + length);
      if (std::max(q.x, q.x + s.x) < pxlo - pad || std::min(q.x, q.x + s.x) > pxhi + pad ||
          std::max(q.y, q.y + s.y) < pylo - pad || std::min(q.y, q.y + s.y) > pyhi + pad) {
        continue;
      }
      intersect(p, r, q, s, i, j, hits);
    }
  }

  Multiplicity out;
  out.crossings = hits.size();
  if (hits.empty()) return out;

  std::vector<std::size_t> parent(hits.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t a = 0; a < hits.size(); ++a) {
    for (std::size_t b = a + 1; b < hits.size(); ++b) {
      if (norm(hits[a].at - hits[b].at) <= dx) parent[find(parent, a)] = find(parent, b);
    }
  }
  std::vector<std::vector<std::size_t>> segments(hits.size());
  for (std::size_t a = 0; a < hits.size(); ++a) {
    auto& seg = segments[find(parent, a)];
    seg.push_back(hits[a].i);
    seg.push_back(hits[a].j);
  }
  for (auto& seg : segments) {
    if (seg.empty()) continue;
    std::sort(seg.begin(), seg.end());
    seg.erase(std::unique(seg.begin(), seg.end()), seg.end());
    out.value = std::max(out.value, count_runs(seg, n));
  }

  // Near-merging clusters make the count tolerance-dependent.
  for (std::size_t a = 0; a < hits.size() && !out.ambiguous; ++a) {
    for (std::size_t b = a + 1; b < hits.size(); ++b) {
      if (find(parent, a) == find(parent, b)) continue;
      if (norm(hits[a].at - hits[b].at) <= 2.0 * dx) {
        out.ambiguous = true;
        break;
      }
    }
  }
  return out;
}

EmbeddednessVerdict embeddedness_bound_check(const GeometryCache& cache, int m) {
  EmbeddednessVerdict v;
  v.k_osc = cache.k_osc;
  v.lhs = static_cast<double>(m) * m;
  v.rhs = (cache.k_osc + 4.0 * cache.omega * cache.omega * kPi * kPi) / 16.0;
  v.holds = v.lhs <= v.rhs;
  return v;
}

double embeddedness_threshold() noexcept { return 64.0 - 4.0 * kPi * kPi; }

Reparametrization reparametrize_by_arclength(const ClosedCurve& curve) {
  const auto n = curve.size();
  const auto xu = spectral::differentiate(curve.x(), 1);
  const auto yu = spectral::differentiate(curve.y(), 1);
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = std::hypot(xu[j], yu[j]);
  const double length = spectral::mean(g);
  if (!(length > 0.0)) throw DegenerateParametrization("zero length curve");

  // s(u) = L u + S(u) - S(0) with S the periodic antiderivative of g - L.
  const auto periodic = Spectrum::of(spectral::antiderivative(g));
  const auto speed = Spectrum::of(g);
  const double s0 = periodic.evaluate(0.0);
  auto arclength = [&](double u) { return length * u + periodic.evaluate(u) - s0; };

  std::vector<double> u(n);
  u[0] = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double target = length * static_cast<double>(j) / static_cast<double>(n);
    double lo = 0.0, hi = 1.0;
    double v = static_cast<double>(j) / static_cast<double>(n);
    for (int it = 0; it < 100; ++it) {
      const double f = arclength(v) - target;
      if (f > 0.0) hi = v; else lo = v;
      const double slope = speed.evaluate(v);
      double next = v - f / slope;
      if (!(slope > 0.0) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
      const bool done = std::abs(next - v) <= 1e-15;
      v = next;
      if (done || hi - lo <= 1e-15) break;
    }
    u[j] = v;
  }
  return {resample_curve(curve, u), std::move(u)};
}

ClosedCurve resample_curve(const ClosedCurve& curve, std::span<const double> parameter) {
  return {spectral::interpolate(curve.x(), parameter),
          spectral::interpolate(curve.y(), parameter)};
}

}  // namespace polyflow::geometry
