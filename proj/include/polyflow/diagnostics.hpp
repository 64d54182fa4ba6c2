#pragma once

// Per-slice functionals, evolution-identity residuals, a-priori bound checks,
// convexity waiting time and exponential decay fits.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyflow/geometry.hpp"

namespace polyflow::diagnostics {

struct DiagnosticsRecord {
  double t = 0.0;
  double length = 0.0;
  double area = 0.0;
  double iso_ratio = 0.0;
  int omega = 0;
  double kappa_bar = 0.0;
  double k_osc = 0.0;
  double min_kappa = 0.0;
  double dissipation = 0.0;  // D_p = int kappa_{s^p}^2 ds
  std::vector<double> deriv_norms;
  double kosc_residual = 0.0;  // normalized, see KoscIdentity::normalized
  double sup_dev = 0.0;        // max (kappa - kappa_bar)^2
  double sup_dev_bound = 0.0;  // (L/2pi) int kappa_s^2 ds
  std::optional<int> multiplicity;
  bool multiplicity_ambiguous = false;
  /// All interpolation checks for m = 1..p+1 over the eps grid held.
  std::optional<bool> interpolation_holds;
};

struct RecordOptions {
  bool multiplicity = false;
  bool interpolation = false;
  std::vector<double> eps_grid{1e-2, 1e-1, 1.0};
  bool dealias = true;
};

/// Collects every tracked functional of one time slice. `curve` is only read
/// when multiplicity tracking is requested.
DiagnosticsRecord make_record(double t, const geometry::ClosedCurve& curve,
                              const geometry::GeometryCache& cache, int p,
                              const RecordOptions& options = {});

struct Verdict {
  std::string name;
  std::string anchor;  // the relation being checked, in formula form
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool inconclusive = false;
  std::string detail;
};

struct FitResult {
  double rate = 0.0;  // -slope of ln y against t
  double rms_residual = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t samples = 0;
};

enum class StopReason { reached_t_end, kosc_converged, max_steps, singularity };
std::string to_string(StopReason r);

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  std::optional<geometry::ClosedCurve> final_curve;
  StopReason stop_reason = StopReason::max_steps;
  std::string stop_detail;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::map<std::string, FitResult> fits;
  std::vector<Verdict> verdicts;
};

struct Rates {
  double length = 0.0;      // -D_p
  double area = 0.0;        // 0
  double iso_ratio = 0.0;   // -2 I D_p / L
  double kappa_bar = 0.0;   // 2 omega pi D_p / L^2
};

Rates predicted_rates(const geometry::GeometryCache& cache, int p);

struct KoscIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // lhs - rhs
  double scale = 1.0;     // max(1, K_osc D_p / L)
  double normalized() const;
};

/// Evaluates both sides of the oscillation-of-curvature evolution identity
/// on one slice, with the time derivative replaced by its spatial form:
///
///   lhs = 2(-1)^p L int phi kappa^2 kappa_{s^2p} + (-1)^{p+1} L int phi^2 kappa kappa_{s^2p}
///         - 8 omega^2 pi^2 D_p / L
///   rhs = L int [phi^3 + c kappa_bar phi^2]_{s^p} phi_{s^p}
///
/// with phi = kappa - kappa_bar. Integration by parts gives c = 3; other
/// values of `mean_coefficient` are accepted for comparison.
KoscIdentity kosc_identity(const geometry::GeometryCache& cache, int p,
                           double mean_coefficient = 3.0, bool dealias = true);

/// kosc_identity(cache, p).normalized().
double kosc_identity_residual(const geometry::GeometryCache& cache, int p);

/// K_osc(t) <= K_osc(0) + 4 omega^2 pi^2 ln I(0) + 1e-6 (1 + K_osc(0)).
Verdict kosc_bound_check(std::span<const DiagnosticsRecord> series, double k_osc0,
                         double iso0, int omega);

struct WaitingTime {
  double measured = 0.0;
  double bound = 0.0;
  /// No nonconvex record follows a convex one.
  bool convex_after_waiting = true;
  Verdict verdict;
};

/// (2/(p+1)) [(L/2pi)^{2(p+1)} - (A/pi)^{p+1}].
double waiting_time_bound(double length0, double area0, int p);

/// Measure of the union of record intervals adjacent to a record with
/// min kappa <= 1e-10 / L(0), compared with waiting_time_bound.
WaitingTime waiting_time(std::span<const DiagnosticsRecord> series, int p);

/// (4 pi^2 / L0^2)^{p+1}.
double decay_rate_floor(double length0, int p);

/// Least-squares slope of ln y against t on [t_a, t_b]. Throws InvalidInput
/// on nonpositive values or fewer than 10 samples in the window.
FitResult fit_exponential_rate(std::span<const double> t, std::span<const double> y,
                               double t_a, double t_b);

/// Fit on the last `tail_fraction` of the time span.
FitResult fit_exponential_tail(std::span<const double> t, std::span<const double> y,
                               double tail_fraction = 0.5);

struct SupDeviation {
  double value = 0.0;  // max_j (kappa_j - kappa_bar)^2
  double bound = 0.0;  // (L/2pi) int kappa_s^2 ds
  bool holds = false;
};

SupDeviation sup_deviation(const geometry::GeometryCache& cache);

/// |k-th Fourier coefficient| of the radius as a function of polar angle
/// about the node centroid, normalized so r = r0 + a cos(k theta) gives a.
double mode_amplitude(const geometry::ClosedCurve& curve, int k);

/// Centroid of the nodes and their mean distance to it.
struct Circle {
  double cx = 0.0, cy = 0.0, r = 0.0;
};
Circle best_fit_circle(const geometry::ClosedCurve& curve);
double max_distance_to_circle(const geometry::ClosedCurve& curve, const Circle& c);

/// Largest relative error of the 3-point centered dL/dt against -D_p over
/// interior records where |L_{i+1} - L_{i-1}| >= 1e-9 L. Returns 0 when no
/// record qualifies.
struct RateIdentity {
  double max_relative_error = 0.0;
  std::size_t evaluated = 0;
};
RateIdentity length_rate_identity(std::span<const DiagnosticsRecord> series);

struct AnalysisOptions {
  int p = 1;
  double tail_fraction = 0.5;
};

/// Fills result.fits and result.verdicts from the recorded series.
void analyze(RunResult& result, const AnalysisOptions& options);

}  // namespace polyflow::diagnostics
