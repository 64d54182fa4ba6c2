#include "polyflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "polyflow/errors.hpp"
#include "polyflow/spectral.hpp"

namespace polyflow::flow {

using geometry::ClosedCurve;
using geometry::GeometryCache;
using spectral::Complex;
using spectral::Spectrum;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRampGrowth = 1.02;

double sign_pow(int p) { return p % 2 == 0 ? 1.0 : -1.0; }

geometry::GeometryOptions geometry_options(const FlowConfig& c) {
  geometry::GeometryOptions o;
  o.m_max = c.resolved_m_max();
  o.filter_tolerance = c.filter_tolerance;
  return o;
}

// Implicit symbol -(2 pi k / g_min)^{2p+2}; g_min equals L on a uniform grid.
std::vector<double> implicit_symbol(const GeometryCache& cache, int p) {
  const double g = *std::min_element(cache.ds_weight.begin(), cache.ds_weight.end());
  std::vector<double> lam(cache.size() / 2 + 1);
  for (std::size_t k = 0; k < lam.size(); ++k) {
    lam[k] = -std::pow(2.0 * kPi * static_cast<double>(k) / g, 2.0 * p + 2.0);
  }
  return lam;
}

// Solves (a - dt * Lambda) x = rhs mode by mode.
std::vector<double> implicit_solve(std::span<const double> rhs, std::span<const double> lam,
                                   double a, double dt) {
  auto spec = Spectrum::of(rhs);
  auto c = spec.coefficients();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] /= (a - dt * lam[k]);
  return spec.samples();
}

// base + scale * d, projected off the Nyquist mode, which the geometry
// cannot see and the flow would therefore never damp.
ClosedCurve add(const ClosedCurve& base, std::span<const double> dx, std::span<const double> dy,
                double scale) {
  std::vector<double> x(base.x().begin(), base.x().end());
  std::vector<double> y(base.y().begin(), base.y().end());
  for (std::size_t j = 0; j < x.size(); ++j) {
    x[j] += scale * dx[j];
    y[j] += scale * dy[j];
  }
  return {spectral::without_nyquist(x), spectral::without_nyquist(y)};
}

void check_blowup(const FlowState& s, double length0) {
  const auto& c = s.cache;
  bool finite = std::isfinite(c.length) && std::isfinite(c.area) && std::isfinite(c.k_osc);
  for (double v : c.kappa()) finite = finite && std::isfinite(v);
  if (!finite) throw SingularitySuspected("non-finite geometry at t = " + std::to_string(s.t));
  if (c.max_abs_kappa() > 1e6 / length0) {
    throw SingularitySuspected("max |kappa| = " + std::to_string(c.max_abs_kappa()) +
                               " exceeds 1e6 / L(0) at t = " + std::to_string(s.t));
  }
  if (std::abs(c.omega_residual) > 1e-3) {
    throw SingularitySuspected("total curvature no longer resolves an integer winding number at t = " +
                               std::to_string(s.t));
  }
}

ClosedCurve renormalized(const ClosedCurve& curve, double area, double target) {
  const double cx = spectral::mean(curve.x()), cy = spectral::mean(curve.y());
  const double f = std::sqrt(target / area);
  return curve.translated(-cx, -cy).scaled(f).translated(cx, cy);
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::imex_euler: return "imex_euler";
    case Scheme::imex_bdf2: return "imex_bdf2";
    case Scheme::explicit_rk4: return "explicit_rk4";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "imex_euler") return Scheme::imex_euler;
  if (name == "imex_bdf2") return Scheme::imex_bdf2;
  if (name == "explicit_rk4") return Scheme::explicit_rk4;
  throw InvalidSpec("unknown scheme '" + name + "' (imex_euler, imex_bdf2, explicit_rk4)");
}

void FlowConfig::validate() const {
  if (p < 1) throw InvalidSpec("p must be >= 1, got " + std::to_string(p));
  if (n < 64 || n % 2 != 0) {
    throw InvalidSpec("grid size must be even and >= 64, got " + std::to_string(n));
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidSpec("dt must be positive");
  if (!(eta > 0.0 && eta <= 0.1)) throw InvalidSpec("eta must lie in (0, 0.1]");
  if (!(safety > 0.0 && safety <= 1.0)) throw InvalidSpec("safety must lie in (0, 1]");
  if (resolved_m_max() < 2 * p + 2) {
    throw InvalidSpec("m_max must be >= 2p+2 = " + std::to_string(2 * p + 2));
  }
  if (startup_ramp < 0 || startup_ramp > 40) throw InvalidSpec("startup_ramp must lie in [0, 40]");
  if (resample_every == 0 || record_every == 0) {
    throw InvalidSpec("resample_every and record_every must be positive");
  }
}

FlowState make_state(ClosedCurve curve, const FlowConfig& config, double t) {
  auto cache = geometry::derive_geometry(curve, geometry_options(config));
  return FlowState{t, std::move(curve), std::move(cache), std::nullopt, config.dt, 0};
}

std::vector<double> normal_velocity(const GeometryCache& cache, int p) {
  if (p < 1) throw InvalidInput("flow order p must be >= 1");
  if (cache.m_max() < 2 * p) {
    throw InvalidInput("normal velocity needs kappa_{s^" + std::to_string(2 * p) +
                       "}, cache holds up to order " + std::to_string(cache.m_max()));
  }
  const auto k = cache.kappa_s(2 * p);
  std::vector<double> v(k.begin(), k.end());
  if (p % 2 == 1) {
    for (auto& x : v) x = -x;
  }
  return v;
}

std::vector<double> curvature_rate(const GeometryCache& cache, int p) {
  if (p < 1) throw InvalidInput("flow order p must be >= 1");
  if (cache.m_max() < 2 * p + 2) {
    throw InvalidInput("curvature rate needs kappa_{s^" + std::to_string(2 * p + 2) +
                       "}, cache holds up to order " + std::to_string(cache.m_max()));
  }
  const auto k = cache.kappa();
  const auto a = cache.kappa_s(2 * p + 2);
  const auto b = cache.kappa_s(2 * p);
  std::vector<double> r(k.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = sign_pow(p) * (a[j] + k[j] * k[j] * b[j]);
  return r;
}

std::vector<double> tangential_velocity(const GeometryCache& cache, std::span<const double> v,
                                        bool dealias) {
  auto kv = spectral::product(cache.kappa(), v, dealias);
  const double mean_kv = cache.integral(kv) / cache.length;
  for (std::size_t j = 0; j < kv.size(); ++j) kv[j] = cache.ds_weight[j] * (kv[j] - mean_kv);
  return spectral::antiderivative(kv);
}

Velocity total_velocity(const GeometryCache& cache, int p, bool dealias) {
  const auto v = normal_velocity(cache, p);
  const auto t = tangential_velocity(cache, v, dealias);
  Velocity w;
  w.x.resize(v.size());
  w.y.resize(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    w.x[j] = v[j] * cache.normal_x[j] + t[j] * cache.tangent_x[j];
    w.y[j] = v[j] * cache.normal_y[j] + t[j] * cache.tangent_y[j];
  }
  return w;
}

FlowState step(const FlowState& state, const FlowConfig& config, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("step size must be positive");
  const int p = config.p;
  const auto opts = geometry_options(config);
  const auto w = total_velocity(state.cache, p, config.dealias);
  const auto& g = state.curve;
  const auto n = g.size();

  std::optional<ClosedCurve> next;
  switch (config.scheme) {
    case Scheme::explicit_rk4: {
      auto stage = [&](const ClosedCurve& c) {
        return total_velocity(geometry::derive_geometry(c, opts), p, config.dealias);
      };
      const auto k2 = stage(add(g, w.x, w.y, 0.5 * dt));
      const auto k3 = stage(add(g, k2.x, k2.y, 0.5 * dt));
      const auto k4 = stage(add(g, k3.x, k3.y, dt));
      std::vector<double> dx(n), dy(n);
      for (std::size_t j = 0; j < n; ++j) {
        dx[j] = (w.x[j] + 2.0 * k2.x[j] + 2.0 * k3.x[j] + k4.x[j]) / 6.0;
        dy[j] = (w.y[j] + 2.0 * k2.y[j] + 2.0 * k3.y[j] + k4.y[j]) / 6.0;
      }
      next = add(g, dx, dy, dt);
      break;
    }
    case Scheme::imex_euler:
    case Scheme::imex_bdf2: {
      const auto lam = implicit_symbol(state.cache, p);
      auto euler = [&](const ClosedCurve& c, const GeometryCache& cache, const Velocity& v,
                       double h) {
        const auto l = implicit_symbol(cache, p);
        return add(c, implicit_solve(v.x, l, 1.0, h), implicit_solve(v.y, l, 1.0, h), h);
      };
      if (config.scheme == Scheme::imex_euler) {
        next = euler(g, state.cache, w, dt);
        break;
      }
      if (!state.prev) {
        // Start the two-step scheme with a Richardson-extrapolated Euler
        // step, which is second order like the scheme itself.
        const auto full = euler(g, state.cache, w, dt);
        const auto half = euler(g, state.cache, w, 0.5 * dt);
        const auto half_cache = geometry::derive_geometry(half, opts);
        const auto two = euler(half, half_cache, total_velocity(half_cache, p, config.dealias),
                               0.5 * dt);
        std::vector<double> x(n), y(n);
        for (std::size_t j = 0; j < n; ++j) {
          x[j] = 2.0 * two.x()[j] - full.x()[j];
          y[j] = 2.0 * two.y()[j] - full.y()[j];
        }
        next = ClosedCurve(spectral::without_nyquist(x), spectral::without_nyquist(y));
        break;
      }
      const auto& h = *state.prev;
      const double om = dt / h.dt;
      const double a = (1.0 + 2.0 * om) / (1.0 + om);
      std::vector<double> rx(n), ry(n), sx(n), sy(n);
      for (std::size_t j = 0; j < n; ++j) {
        rx[j] = om * (h.curve.x()[j] - g.x()[j]) + dt * ((1.0 + om) * w.x[j] - om * h.wx[j]);
        ry[j] = om * (h.curve.y()[j] - g.y()[j]) + dt * ((1.0 + om) * w.y[j] - om * h.wy[j]);
        sx[j] = (1.0 + om) * g.x()[j] - om * h.curve.x()[j];
        sy[j] = (1.0 + om) * g.y()[j] - om * h.curve.y()[j];
      }
      const auto dx = implicit_solve(rx, lam, a, dt);
      const auto dy = implicit_solve(ry, lam, a, dt);
      next = add(ClosedCurve(std::move(sx), std::move(sy)), dx, dy, 1.0);
      break;
    }
  }

  if (config.renormalize_area) {
    const auto c = geometry::derive_geometry(*next, opts);
    next = renormalized(*next, c.area, state.cache.area);
  }
  FlowState out{state.t + dt, *next, geometry::derive_geometry(*next, opts),
                History{g, w.x, w.y, dt}, dt, state.steps + 1};
  return out;
}

FlowState step(const FlowState& state, const FlowConfig& config) {
  return step(state, config, state.dt_current > 0.0 ? state.dt_current : config.dt);
}

FlowState reparametrize(const FlowState& state, const FlowConfig& config) {
  auto re = geometry::reparametrize_by_arclength(state.curve);
  ClosedCurve curve(spectral::without_nyquist(re.curve.x()), spectral::without_nyquist(re.curve.y()));
  FlowState out{state.t, std::move(curve), {}, std::nullopt, state.dt_current, state.steps};
  out.cache = geometry::derive_geometry(out.curve, geometry_options(config));
  if (state.prev) {
    const auto& h = *state.prev;
    out.prev = History{geometry::resample_curve(h.curve, re.parameter),
                       spectral::interpolate(h.wx, re.parameter),
                       spectral::interpolate(h.wy, re.parameter), h.dt};
  }
  return out;
}

ClosedCurve prepare_initial(const ClosedCurve& curve, std::size_t n) {
  auto resize = [n](std::span<const double> v) {
    return v.size() <= n ? spectral::refine(v, n) : spectral::restrict_to(v, n);
  };
  ClosedCurve grid(resize(curve.x()), resize(curve.y()));
  const auto uniform = geometry::reparametrize_by_arclength(grid).curve;
  return {spectral::without_nyquist(uniform.x()), spectral::without_nyquist(uniform.y())};
}

diagnostics::RunResult run(const ClosedCurve& initial, const FlowConfig& config,
                           const Observer& observer) {
  config.validate();
  diagnostics::RunResult result;
  FlowState state = make_state(prepare_initial(initial, config.n), config);
  geometry::winding_number(state.cache);

  const double length0 = state.cache.length;
  const double dt_min = 1e-14 * std::pow(length0, 2.0 * config.p + 2.0);
  const double t_slack = 1e-12 * std::max(1.0, std::abs(config.t_end));
  auto record = [&](const FlowState& s) {
    result.records.push_back(
        diagnostics::make_record(s.t, s.curve, s.cache, config.p, config.record));
    if (observer) observer(s, result.records.back());
  };
  record(state);

  double dt = config.dt;
  std::size_t streak = 0;
  std::size_t since_record = 0;
  try {
    while (true) {
      if (state.t >= config.t_end - t_slack) {
        result.stop_reason = diagnostics::StopReason::reached_t_end;
        break;
      }
      if (state.cache.k_osc <= config.kosc_stop) {
        result.stop_reason = diagnostics::StopReason::kosc_converged;
        break;
      }
      if (state.steps >= config.max_steps) {
        result.stop_reason = diagnostics::StopReason::max_steps;
        break;
      }

      double h = std::min(dt, config.t_end - state.t);
      if (!config.adaptive && config.startup_ramp > 0) {
        h = std::min(h, std::ldexp(dt, -config.startup_ramp) *
                            std::pow(kRampGrowth, static_cast<double>(state.steps)));
      }
      std::optional<FlowState> trial;
      try {
        trial = step(state, config, h);
        check_blowup(*trial, length0);
      } catch (const DegenerateParametrization& e) {
        if (!config.adaptive) throw SingularitySuspected(e.what());
        trial.reset();
      } catch (const SingularitySuspected&) {
        if (!config.adaptive) throw;
        trial.reset();
      }

      if (config.adaptive) {
        bool ok = trial.has_value();
        if (ok) {
          const double dl = std::abs(trial->cache.length - state.cache.length) / state.cache.length;
          const double dk = std::abs(trial->cache.k_osc - state.cache.k_osc) /
                            std::max(state.cache.k_osc, 1e-13);
          ok = dl <= config.eta && dk <= config.eta;
        }
        if (!ok) {
          ++result.rejected_steps;
          streak = 0;
          dt *= 0.5;
          if (dt < dt_min) {
            throw SingularitySuspected("step size " + std::to_string(dt) +
                                       " fell below 1e-14 L(0)^(2p+2) at t = " +
                                       std::to_string(state.t));
          }
          continue;
        }
        if (++streak >= 10) {
          dt *= 1.0 + config.safety;
          streak = 0;
        }
      }

      state = std::move(*trial);
      ++result.accepted_steps;
      if (state.steps % config.resample_every == 0) state = reparametrize(state, config);
      if (++since_record >= config.record_every) {
        record(state);
        since_record = 0;
      }
    }
  } catch (const SingularitySuspected& e) {
    result.stop_reason = diagnostics::StopReason::singularity;
    result.stop_detail = e.what();
  }

  if (since_record > 0 && result.stop_reason != diagnostics::StopReason::singularity) {
    record(state);
  }
  result.final_curve = state.curve;
  diagnostics::analyze(result, {config.p});
  return result;
}

}  // namespace polyflow::flow
