#include "polyflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "polyflow/errors.hpp"
#include "polyflow/inequality.hpp"
#include "polyflow/spectral.hpp"

namespace polyflow::diagnostics {

using geometry::GeometryCache;

namespace {

constexpr double kPi = std::numbers::pi;

double sign_pow(int p) { return p % 2 == 0 ? 1.0 : -1.0; }

void require_order(const GeometryCache& cache, int order, const char* what) {
  if (cache.m_max() < order) {
    throw InvalidInput(std::string(what) + " needs curvature derivatives up to order " +
                       std::to_string(order) + ", cache holds " +
                       std::to_string(cache.m_max()));
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Verdict make_verdict(std::string name, std::string anchor, double measured, double bound,
                     double tolerance, bool passed, std::string detail = {}) {
  Verdict v;
  v.name = std::move(name);
  v.anchor = std::move(anchor);
  v.measured = measured;
  v.bound = bound;
  v.tolerance = tolerance;
  v.passed = passed;
  v.detail = std::move(detail);
  return v;
}

}  // namespace

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::reached_t_end: return "reached_t_end";
    case StopReason::kosc_converged: return "kosc_converged";
    case StopReason::max_steps: return "max_steps";
    case StopReason::singularity: return "singularity_suspected";
  }
  return "unknown";
}

DiagnosticsRecord make_record(double t, const geometry::ClosedCurve& curve,
                              const GeometryCache& cache, int p,
                              const RecordOptions& options) {
  DiagnosticsRecord r;
  r.t = t;
  r.length = cache.length;
  r.area = cache.area;
  r.iso_ratio = cache.iso_ratio;
  r.omega = cache.omega;
  r.kappa_bar = cache.kappa_bar;
  r.k_osc = cache.k_osc;
  r.min_kappa = cache.min_kappa();
  r.dissipation = cache.deriv_norms.at(static_cast<std::size_t>(p));
  r.deriv_norms = cache.deriv_norms;
  r.kosc_residual = kosc_identity(cache, p, 3.0, options.dealias).normalized();
  const auto sd = sup_deviation(cache);
  r.sup_dev = sd.value;
  r.sup_dev_bound = sd.bound;
  if (options.multiplicity) {
    const auto m = geometry::max_multiplicity(curve);
    r.multiplicity = m.value;
    r.multiplicity_ambiguous = m.ambiguous;
  }
  if (options.interpolation) {
    bool ok = true;
    for (int m = 1; m <= p + 1 && m + 1 <= cache.m_max(); ++m) {
      for (const auto& v : inequality::iterated_interp_check(cache, m, options.eps_grid)) {
        ok = ok && v.holds;
      }
    }
    r.interpolation_holds = ok;
  }
  return r;
}

Rates predicted_rates(const GeometryCache& cache, int p) {
  if (p < 1) throw InvalidInput("flow order p must be >= 1");
  require_order(cache, p, "predicted rates");
  const double d = cache.deriv_norms[static_cast<std::size_t>(p)];
  const double len = cache.length;
  Rates r;
  r.length = -d;
  r.area = 0.0;
  r.iso_ratio = -2.0 * cache.iso_ratio * d / len;
  r.kappa_bar = 2.0 * cache.omega * kPi * d / (len * len);
  return r;
}

double KoscIdentity::normalized() const { return std::abs(residual) / scale; }

KoscIdentity kosc_identity(const GeometryCache& cache, int p, double mean_coefficient,
                           bool dealias) {
  if (p < 1) throw InvalidInput("flow order p must be >= 1");
  require_order(cache, 2 * p, "oscillation identity");
  const auto n = cache.size();
  const auto kappa = cache.kappa();
  const auto k2p = cache.kappa_s(2 * p);
  const double kb = cache.kappa_bar;
  const double len = cache.length;
  const double dp = cache.deriv_norms[static_cast<std::size_t>(p)];

  std::vector<double> phi(n), a(n), b(n);
  for (std::size_t j = 0; j < n; ++j) phi[j] = kappa[j] - kb;
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = phi[j] * kappa[j] * kappa[j] * k2p[j];
    b[j] = phi[j] * phi[j] * kappa[j] * k2p[j];
  }
  const double w = static_cast<double>(cache.omega);
  KoscIdentity out;
  out.lhs = 2.0 * sign_pow(p) * len * cache.integral(a) - sign_pow(p) * len * cache.integral(b) -
            8.0 * w * w * kPi * kPi * dp / len;

  const auto phi2 = spectral::product(phi, phi, dealias);
  const auto phi3 = spectral::product(phi2, phi, dealias);
  std::vector<double> h(n);
  for (std::size_t j = 0; j < n; ++j) h[j] = phi3[j] + mean_coefficient * kb * phi2[j];
  const auto hp = geometry::arclength_derivative(cache, h, p);
  const auto phip = cache.kappa_s(p);
  for (std::size_t j = 0; j < n; ++j) a[j] = hp[j] * phip[j];
  out.rhs = len * cache.integral(a);

  out.residual = out.lhs - out.rhs;
  out.scale = std::max(1.0, cache.k_osc * dp / len);
  return out;
}

double kosc_identity_residual(const GeometryCache& cache, int p) {
  return kosc_identity(cache, p).normalized();
}

Verdict kosc_bound_check(std::span<const DiagnosticsRecord> series, double k_osc0,
                         double iso0, int omega) {
  const double bound = k_osc0 + 4.0 * omega * omega * kPi * kPi * std::log(iso0);
  const double tol = 1e-6 * (1.0 + k_osc0);
  double sup = 0.0;
  for (const auto& r : series) sup = std::max(sup, r.k_osc);
  return make_verdict("kosc_a_priori_bound", "K_osc(t) <= K_osc(0) + 4 w^2 pi^2 ln I(0)", sup,
                      bound, tol, sup <= bound + tol,
                      "max violation " + fmt(std::max(0.0, sup - bound)));
}

double waiting_time_bound(double length0, double area0, int p) {
  const double q = p + 1.0;
  return (2.0 / q) *
         (std::pow(length0 / (2.0 * kPi), 2.0 * q) - std::pow(area0 / kPi, q));
}

WaitingTime waiting_time(std::span<const DiagnosticsRecord> series, int p) {
  WaitingTime w;
  if (series.empty()) throw InvalidInput("waiting time needs at least one record");
  const double l0 = series.front().length;
  const double tol = 1e-10 / l0;
  w.bound = waiting_time_bound(l0, series.front().area, p);

  std::vector<bool> nonconvex(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) nonconvex[i] = series[i].min_kappa <= tol;

  double widest = 0.0;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    if (nonconvex[i] || nonconvex[i + 1]) {
      const double h = series[i + 1].t - series[i].t;
      w.measured += h;
      widest = std::max(widest, h);
    }
  }
  bool seen_convex = false;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!nonconvex[i]) seen_convex = true;
    else if (seen_convex) w.convex_after_waiting = false;
  }

  const double tolerance = 1e-12 * (1.0 + w.bound);
  w.verdict = make_verdict("waiting_time", "|{t : min kappa <= 0}| <= (2/(p+1))[(L0/2pi)^(2p+2) - (A0/pi)^(p+1)]",
                           w.measured, w.bound, tolerance,
                           w.measured <= w.bound + tolerance && w.convex_after_waiting);
  if (w.bound > 0.0 && widest > w.bound / 50.0) {
    w.verdict.inconclusive = true;
    w.verdict.passed = false;
    w.verdict.detail = "under-sampled: record spacing " + fmt(widest) + " exceeds bound/50";
  } else if (!w.convex_after_waiting) {
    w.verdict.detail = "curve lost convexity again after becoming convex";
  }
  return w;
}

double decay_rate_floor(double length0, int p) {
  return std::pow(4.0 * kPi * kPi / (length0 * length0), p + 1.0);
}

FitResult fit_exponential_rate(std::span<const double> t, std::span<const double> y,
                               double t_a, double t_b) {
  if (t.size() != y.size()) throw InvalidInput("exponential fit: length mismatch");
  std::vector<double> xs, ls;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_a || t[i] > t_b) continue;
    if (!(y[i] > 0.0)) {
      throw InvalidInput("exponential fit: nonpositive value " + fmt(y[i]) + " at t = " +
                         fmt(t[i]));
    }
    xs.push_back(t[i]);
    ls.push_back(std::log(y[i]));
  }
  if (xs.size() < 10) {
    throw InvalidInput("exponential fit: " + std::to_string(xs.size()) +
                       " samples in window, need >= 10");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ls[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ls[i] - my);
  }
  if (sxx == 0.0) throw InvalidInput("exponential fit: window has zero time span");
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ls[i] - (my + slope * (xs[i] - mx));
    ss += e * e;
  }
  FitResult f;
  f.rate = -slope;
  f.rms_residual = std::sqrt(ss / n);
  f.t_begin = xs.front();
  f.t_end = xs.back();
  f.samples = xs.size();
  return f;
}

FitResult fit_exponential_tail(std::span<const double> t, std::span<const double> y,
                               double tail_fraction) {
  if (t.empty()) throw InvalidInput("exponential fit: empty series");
  const double t_a = t.back() - tail_fraction * (t.back() - t.front());
  return fit_exponential_rate(t, y, t_a, t.back());
}

SupDeviation sup_deviation(const GeometryCache& cache) {
  SupDeviation s;
  for (double k : cache.kappa()) {
    s.value = std::max(s.value, (k - cache.kappa_bar) * (k - cache.kappa_bar));
  }
  const double ks2 = cache.m_max() >= 1 ? cache.deriv_norms[1] : 0.0;
  s.bound = cache.length / (2.0 * kPi) * ks2;
  s.holds = s.value <= s.bound + 1e-10;
  return s;
}

double mode_amplitude(const geometry::ClosedCurve& curve, int k) {
  const auto n = curve.size();
  const double cx = spectral::mean(curve.x());
  const double cy = spectral::mean(curve.y());
  std::vector<double> xr(n), yr(n);
  for (std::size_t j = 0; j < n; ++j) {
    xr[j] = curve.x()[j] - cx;
    yr[j] = curve.y()[j] - cy;
  }
  const auto xu = spectral::differentiate(xr, 1);
  const auto yu = spectral::differentiate(yr, 1);
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r2 = xr[j] * xr[j] + yr[j] * yr[j];
    const double theta_u = (xr[j] * yu[j] - yr[j] * xu[j]) / r2;
    const double theta = std::atan2(yr[j], xr[j]);
    const double r = std::sqrt(r2);
    re += r * std::cos(k * theta) * theta_u;
    im -= r * std::sin(k * theta) * theta_u;
  }
  return std::hypot(re, im) / (kPi * static_cast<double>(n));
}

Circle best_fit_circle(const geometry::ClosedCurve& curve) {
  Circle c;
  c.cx = spectral::mean(curve.x());
  c.cy = spectral::mean(curve.y());
  double r = 0.0;
  for (std::size_t j = 0; j < curve.size(); ++j) {
    r += std::hypot(curve.x()[j] - c.cx, curve.y()[j] - c.cy);
  }
  c.r = r / static_cast<double>(curve.size());
  return c;
}

double max_distance_to_circle(const geometry::ClosedCurve& curve, const Circle& c) {
  double d = 0.0;
  for (std::size_t j = 0; j < curve.size(); ++j) {
    d = std::max(d, std::abs(std::hypot(curve.x()[j] - c.cx, curve.y()[j] - c.cy) - c.r));
  }
  return d;
}

RateIdentity length_rate_identity(std::span<const DiagnosticsRecord> series) {
  RateIdentity out;
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    const auto& a = series[i - 1];
    const auto& b = series[i];
    const auto& c = series[i + 1];
    if (std::abs(c.length - a.length) < 1e-9 * b.length || b.dissipation <= 0.0) continue;
    const double h0 = b.t - a.t, h1 = c.t - b.t;
    const double d = -h1 / (h0 * (h0 + h1)) * a.length + (h1 - h0) / (h0 * h1) * b.length +
                     h0 / (h1 * (h0 + h1)) * c.length;
    out.max_relative_error =
        std::max(out.max_relative_error, std::abs(d + b.dissipation) / b.dissipation);
    ++out.evaluated;
  }
  return out;
}

void analyze(RunResult& result, const AnalysisOptions& options) {
  auto& recs = result.records;
  result.verdicts.clear();
  result.fits.clear();
  if (recs.empty()) return;
  const auto& r0 = recs.front();
  const int p = options.p;
  auto& out = result.verdicts;

  double area_drift = 0.0, length_rise = 0.0, iso_rise = 0.0, kb_drop = 0.0;
  bool omega_const = true;
  double worst_residual = 0.0, worst_sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    area_drift = std::max(area_drift, std::abs(r.area - r0.area) / std::abs(r0.area));
    omega_const = omega_const && r.omega == r0.omega;
    worst_residual = std::max(worst_residual, r.kosc_residual);
    worst_sup = std::max(worst_sup, r.sup_dev - r.sup_dev_bound);
    if (i == 0) continue;
    const auto& q = recs[i - 1];
    length_rise = std::max(length_rise, (r.length - q.length) / r0.length);
    iso_rise = std::max(iso_rise, (r.iso_ratio - q.iso_ratio) / r0.iso_ratio);
    kb_drop = std::max(kb_drop, (q.kappa_bar - r.kappa_bar) / std::abs(r0.kappa_bar));
  }

  out.push_back(make_verdict("area_conservation", "dA/dt = 0", area_drift, 1e-6, 0.0,
                             area_drift <= 1e-6, "max |A(t) - A(0)| / A(0)"));
  out.push_back(make_verdict("length_nonincreasing", "dL/dt = -int kappa_{s^p}^2 ds <= 0",
                             length_rise, 1e-10, 0.0, length_rise <= 1e-10,
                             "max (L_{n+1} - L_n) / L(0)"));
  out.push_back(make_verdict("isoperimetric_nonincreasing", "dI/dt = -(2I/L) int kappa_{s^p}^2 ds <= 0",
                             iso_rise, 1e-10, 0.0, iso_rise <= 1e-10,
                             "max (I_{n+1} - I_n) / I(0)"));
  out.push_back(make_verdict("winding_constant", "int kappa ds = 2 pi w", omega_const ? 0.0 : 1.0,
                             0.0, 0.0, omega_const, "w(0) = " + std::to_string(r0.omega)));
  if (r0.omega == 1) {
    out.push_back(make_verdict("kappa_bar_nondecreasing",
                               "d kappa_bar/dt = (2 w pi / L^2) int kappa_{s^p}^2 ds >= 0",
                               kb_drop, 1e-10, 0.0, kb_drop <= 1e-10,
                               "max (kappa_bar_n - kappa_bar_{n+1}) / |kappa_bar(0)|"));
  }

  const auto rate = length_rate_identity(recs);
  out.push_back(make_verdict("length_rate_identity", "dL/dt = -int kappa_{s^p}^2 ds",
                             rate.max_relative_error, 1e-3, 0.0, rate.max_relative_error <= 1e-3,
                             std::to_string(rate.evaluated) + " centered differences"));
  out.push_back(make_verdict("kosc_identity",
                             "d/dt(K_osc + 8 w^2 pi^2 ln L) + (D_p/L) K_osc + 2L int kappa_{s^{p+1}}^2 "
                             "= L int [phi^3 + 3 kappa_bar phi^2]_{s^p} phi_{s^p}",
                             worst_residual, 1e-8, 0.0, worst_residual <= 1e-8,
                             "normalized by max(1, K_osc D_p / L)"));
  out.push_back(make_verdict("sup_deviation", "||kappa - kappa_bar||_inf^2 <= (L/2pi) int kappa_s^2 ds",
                             std::max(0.0, worst_sup), 1e-10, 0.0, worst_sup <= 1e-10,
                             "max excess over the bound"));

  if (r0.omega == 1) {
    out.push_back(kosc_bound_check(recs, r0.k_osc, r0.iso_ratio, r0.omega));
    out.push_back(waiting_time(recs, p).verdict);
  }

  bool interp_tracked = false, interp_ok = true;
  bool mult_tracked = false, mult_one = true, mult_bound = true;
  for (const auto& r : recs) {
    if (r.interpolation_holds) {
      interp_tracked = true;
      interp_ok = interp_ok && *r.interpolation_holds;
    }
    if (r.multiplicity) {
      mult_tracked = true;
      const double m = *r.multiplicity;
      mult_one = mult_one && *r.multiplicity == 1;
      mult_bound = mult_bound &&
                   m * m <= (r.k_osc + 4.0 * r.omega * r.omega * kPi * kPi) / 16.0;
    }
  }
  if (interp_tracked) {
    out.push_back(make_verdict("iterated_interpolation",
                               "int kappa_{s^m}^2 <= eps L^2 int kappa_{s^{m+1}}^2 + L^{-(2m+1)} K_osc / (4 eps^m)",
                               interp_ok ? 0.0 : 1.0, 0.0, 1e-10, interp_ok,
                               "m = 1..p+1, eps in {0.01, 0.1, 1}, every record"));
  }
  if (mult_tracked && r0.omega == 1) {
    out.push_back(make_verdict("embeddedness", "m^2 <= (K_osc + 4 w^2 pi^2) / 16",
                               mult_one ? 1.0 : 2.0, 1.0, 0.0, mult_one && mult_bound,
                               mult_bound ? "multiplicity bound holds on every record"
                                          : "multiplicity bound violated"));
  }

  // Tail decay of the oscillation and of the dissipation.
  const double floor_rate = decay_rate_floor(r0.length, p);
  const bool decaying = r0.k_osc > 1e-20 && recs.back().k_osc < 1e-2 * r0.k_osc;
  std::vector<double> t, y0, yp;
  for (const auto& r : recs) {
    t.push_back(r.t);
    y0.push_back(r.k_osc / r.length);
    yp.push_back(r.dissipation);
  }
  for (const auto& [name, ys] : {std::pair<std::string, const std::vector<double>*>{"oscillation_l2", &y0},
                                 std::pair<std::string, const std::vector<double>*>{"dissipation", &yp}}) {
    if (!decaying) {
      out.push_back(make_verdict("decay_rate_" + name, "rate >= (4 pi^2 / L0^2)^(p+1)", 0.0,
                                 floor_rate, 0.05 * floor_rate, true,
                                 "not applicable: no decaying oscillation in this run"));
      continue;
    }
    try {
      const auto fit = fit_exponential_tail(t, *ys, options.tail_fraction);
      result.fits[name] = fit;
      out.push_back(make_verdict("decay_rate_" + name, "rate >= (4 pi^2 / L0^2)^(p+1)", fit.rate,
                                 floor_rate, 0.05 * floor_rate,
                                 fit.rate >= 0.95 * floor_rate,
                                 "tail fit over " + std::to_string(fit.samples) + " records"));
    } catch (const InvalidInput& e) {
      auto v = make_verdict("decay_rate_" + name, "rate >= (4 pi^2 / L0^2)^(p+1)", 0.0,
                            floor_rate, 0.05 * floor_rate, false, e.what());
      v.inconclusive = true;
      out.push_back(v);
    }
  }
}

}  // namespace polyflow::diagnostics
