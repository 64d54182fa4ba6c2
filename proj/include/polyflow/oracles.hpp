#pragma once

// Slow, independent reference computations. Nothing here differentiates
// through the spectral kernels except discrete_jacobian_eigenvalues, which
// measures the pipeline itself.

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "polyflow/geometry.hpp"

namespace polyflow::oracles {

/// Position and its first three derivatives with respect to the parameter.
struct Jet {
  std::array<double, 4> x{};
  std::array<double, 4> y{};
};

/// Closed-form closed curve on theta in [0, 2 pi).
class AnalyticShape {
 public:
  using JetFn = std::function<Jet(double)>;
  explicit AnalyticShape(JetFn jet) : jet_(std::move(jet)) {}

  static AnalyticShape circle(double r, double cx = 0.0, double cy = 0.0);
  static AnalyticShape ellipse(double a, double b);
  /// Circle traversed `turns` times.
  static AnalyticShape multiple_circle(double r, int turns);
  /// Polar curve; `radius` returns r, r', r'', r''' at theta.
  static AnalyticShape polar(std::function<std::array<double, 4>(double)> radius);
  /// r(theta) = r0 + delta cos(k theta + phase).
  static AnalyticShape perturbed_circle(double r0, double delta, int k, double phase = 0.0);

  Jet jet(double theta) const { return jet_(theta); }
  double speed(double theta) const;
  /// det(gamma', gamma'') / |gamma'|^3.
  double curvature(double theta) const;
  /// d kappa / d s.
  double curvature_s(double theta) const;
  /// Samples at theta_j = 2 pi j / n.
  geometry::ClosedCurve sample(std::size_t n) const;

 private:
  JetFn jet_;
};

struct QuadratureFunctionals {
  double length = 0.0;
  double area = 0.0;
  double total_curvature = 0.0;
  double kappa_bar = 0.0;
  double k_osc = 0.0;
  double kappa_s_norm = 0.0;  // int kappa_s^2 ds
  double error_estimate = 0.0;  // largest quadrature error estimate
};

/// Adaptive Gauss-Kronrod integration of the closed-form integrands,
/// aiming at 1e-10 absolute.
QuadratureFunctionals quadrature_functionals(const AnalyticShape& shape);

/// Closed-form curvature at theta_j = 2 pi j / n.
std::vector<double> curvature_samples(const AnalyticShape& shape, std::size_t n);

/// Shoelace area of the sample polygon (positive when counterclockwise).
double polygon_area(const geometry::ClosedCurve& curve);

/// Curvature from second-order centered differences of the samples.
std::vector<double> fd_curvature(const geometry::ClosedCurve& curve);

/// Growth rate of mode k of a radial perturbation of the circle of radius r:
/// -k^{2p} (k^2 - 1) / r^{2p+2}.
double linearized_mode_rate(int p, double r, int k);

/// Real parts of the eigenvalues (sorted descending) of the finite-difference
/// Jacobian of the discrete outward normal speed at the circle of radius r
/// sampled at n nodes, with respect to node-wise radial displacements.
/// Also reports the largest imaginary part encountered. The central
/// difference error grows like step^2 k_max^(4p+4); 1e-8 keeps it below
/// 1e-2 |lambda_2| up to n = 256 at p = 2.
struct JacobianSpectrum {
  std::vector<double> real;
  double max_imag = 0.0;
};
JacobianSpectrum discrete_jacobian_eigenvalues(int p, double r, std::size_t n,
                                               double relative_step = 1e-8);

}  // namespace polyflow::oracles
