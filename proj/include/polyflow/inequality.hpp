#pragma once

// Numerical checks of the periodic interpolation inequalities used to
// control curvature along the flow.

#include <span>
#include <vector>

#include "polyflow/geometry.hpp"
#include "polyflow/spectral.hpp"

namespace polyflow::inequality {

struct WirtingerResult {
  double ratio = 0.0;  // int f^2 / int f_x^2
  double bound = 0.0;  // P^2 / (4 pi^2)
  bool holds = false;
  bool equality = false;    // ratio within 1e-10 (relative) of the bound
  bool degenerate = false;  // f constant: both sides vanish
  bool centered = false;    // the input mean was subtracted first
  double removed_mean = 0.0;
};

/// int f^2 <= (P^2/4pi^2) int f_x^2 for the mean-zero part of f, where the
/// samples cover one period P.
WirtingerResult wirtinger_check(const spectral::PeriodicSamples& f, double period);

struct SupBoundResult {
  double sup_squared = 0.0;  // max f^2 on an 8x refined grid
  double bound = 0.0;        // (P/2pi) int f_x^2
  bool holds = false;
  bool centered = false;
};

/// max f^2 <= (P/2pi) int f_x^2 for the mean-zero part of f.
SupBoundResult sup_bound_check(const spectral::PeriodicSamples& f, double period);

struct InterpolationVerdict {
  double epsilon = 0.0;
  double lhs = 0.0;  // int kappa_{s^m}^2 ds
  double rhs = 0.0;  // eps L^2 int kappa_{s^{m+1}}^2 + L^{-(2m+1)} K_osc / (4 eps^m)
  bool holds = false;
};

/// Interpolates int kappa_{s^m}^2 between the next derivative and the
/// oscillation of curvature, for every eps in the grid. Requires m >= 1.
std::vector<InterpolationVerdict> iterated_interp_check(const geometry::GeometryCache& cache,
                                                        int m,
                                                        std::span<const double> eps_grid);

/// int |d_s^{mu_1} phi ... d_s^{mu_v} phi| ds with phi = kappa - kappa_bar.
double p_term_norm(const geometry::GeometryCache& cache, std::span<const int> partition);

/// sum_{j=0}^{order} L^{j+1/2} (int phi_{s^j}^2 ds)^{1/2}.
double k2_norm(const geometry::GeometryCache& cache, int order);

}  // namespace polyflow::inequality
