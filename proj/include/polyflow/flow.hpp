#pragma once

// Time stepping for d/dt gamma = (-1)^p kappa_{s^{2p}} nu.
//
// Nodes are kept equally spaced in arclength by a tangential velocity, so the
// leading part of the velocity is the constant-coefficient operator
// (-1)^p d_s^{2p+2} gamma, diagonal in Fourier space with symbol
// -(2 pi k / L)^{2p+2}. The IMEX schemes treat that symbol implicitly and the
// full geometric velocity explicitly, which leaves circles exactly fixed.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "polyflow/diagnostics.hpp"
#include "polyflow/geometry.hpp"

namespace polyflow::flow {

enum class Scheme { imex_euler, imex_bdf2, explicit_rk4 };

std::string to_string(Scheme s);
/// Throws InvalidSpec on unknown names.
Scheme parse_scheme(const std::string& name);

struct FlowConfig {
  int p = 1;
  std::size_t n = 256;
  Scheme scheme = Scheme::imex_bdf2;
  /// Fixed step, or the initial step when adaptive.
  double dt = 1e-4;
  bool adaptive = false;
  /// dt grows by (1 + safety) after 10 consecutive accepted steps.
  double safety = 0.2;
  /// Largest accepted relative change of L and K_osc per step.
  double eta = 0.01;
  double t_end = std::numeric_limits<double>::infinity();
  /// Stop once K_osc <= kosc_stop.
  double kosc_stop = 0.0;
  std::size_t max_steps = 1000000;
  /// Fixed-step runs start at dt 2^-ramp and grow the step by 2% per step
  /// until dt is reached, so stiff initial transients are resolved.
  int startup_ramp = 0;
  std::size_t resample_every = 20;
  std::size_t record_every = 1;
  bool dealias = true;
  bool renormalize_area = false;
  /// Highest curvature derivative kept in the cache; negative means 2p+4.
  int m_max = -1;
  double filter_tolerance = 1e-13;
  diagnostics::RecordOptions record;

  int resolved_m_max() const { return m_max < 0 ? 2 * p + 4 : m_max; }
  /// Throws InvalidSpec unless p >= 1, N even >= 64, dt > 0, eta in (0, 0.1],
  /// safety in (0, 1] and m_max >= 2p+2.
  void validate() const;
};

struct History {
  geometry::ClosedCurve curve;
  std::vector<double> wx, wy;
  double dt = 0.0;
};

struct FlowState {
  double t = 0.0;
  geometry::ClosedCurve curve;
  geometry::GeometryCache cache;
  std::optional<History> prev;
  double dt_current = 0.0;
  std::size_t steps = 0;
};

/// Builds the state at time t for a curve already on the flow grid.
FlowState make_state(geometry::ClosedCurve curve, const FlowConfig& config, double t = 0.0);

/// V = (-1)^p kappa_{s^{2p}}.
std::vector<double> normal_velocity(const geometry::GeometryCache& cache, int p);

/// kappa_t = (-1)^p (kappa_{s^{2p+2}} + kappa^2 kappa_{s^{2p}}).
std::vector<double> curvature_rate(const geometry::GeometryCache& cache, int p);

/// Tangential speed T keeping |gamma_u| / L constant in time:
/// T_u = |gamma_u| (kappa V - (1/L) int kappa V ds), T of zero mean.
std::vector<double> tangential_velocity(const geometry::GeometryCache& cache,
                                        std::span<const double> v, bool dealias);

/// Velocity V nu + T tau as Cartesian components.
struct Velocity {
  std::vector<double> x, y;
};
Velocity total_velocity(const geometry::GeometryCache& cache, int p, bool dealias);

/// One step of size dt with the configured scheme. Does not reparametrize and
/// does not apply the adaptive policy. Throws DegenerateParametrization if
/// the new curve is not regular.
FlowState step(const FlowState& state, const FlowConfig& config, double dt);

/// One step of size state.dt_current (or config.dt when that is zero).
FlowState step(const FlowState& state, const FlowConfig& config);

/// Resamples the state (and the BDF2 history) to uniform arclength.
FlowState reparametrize(const FlowState& state, const FlowConfig& config);

/// Brings a curve onto the N-point grid spectrally and equalizes arclength.
geometry::ClosedCurve prepare_initial(const geometry::ClosedCurve& curve, std::size_t n);

using Observer = std::function<void(const FlowState&, const diagnostics::DiagnosticsRecord&)>;

/// Runs until the first stop condition, recording every record_every steps,
/// and fills fits and verdicts. A suspected singularity ends the run with
/// StopReason::singularity and the partial series.
diagnostics::RunResult run(const geometry::ClosedCurve& initial, const FlowConfig& config,
                           const Observer& observer = {});

}  // namespace polyflow::flow
