#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace polyflow::geometry {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Uniform-parameter samples gamma(u_j), u_j = j/N, of a closed immersion.
class ClosedCurve {
 public:
  static constexpr std::size_t kMinSize = 16;

  /// Throws InvalidInput unless sizes agree, N >= 16 is even and all
  /// coordinates are finite. Regularity is checked by derive_geometry.
  ClosedCurve(std::vector<double> x, std::vector<double> y);

  template <typename F>
  static ClosedCurve sample(std::size_t n, F&& gamma) {
    std::vector<double> x(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
      const Point p = gamma(static_cast<double>(j) / static_cast<double>(n));
      x[j] = p.x;
      y[j] = p.y;
    }
    return ClosedCurve(std::move(x), std::move(y));
  }

  std::size_t size() const noexcept { return x_.size(); }
  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> y() const noexcept { return y_; }
  Point operator[](std::size_t j) const noexcept { return {x_[j], y_[j]}; }

  ClosedCurve scaled(double factor) const;
  ClosedCurve translated(double dx, double dy) const;
  ClosedCurve rotated(double angle) const;
  /// Same trace, opposite orientation (u -> -u).
  ClosedCurve reversed() const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

struct GeometryOptions {
  /// Highest arclength derivative of curvature to compute.
  int m_max = 6;
  /// Fourier coefficients below this fraction of a field's largest
  /// oscillatory coefficient are treated as round-off and removed before
  /// differentiating. Zero disables the filter.
  double filter_tolerance = 1e-13;
  /// |gamma_u| below this fraction of its mean is a degenerate parametrization.
  double regularity_tolerance = 1e-8;
};

/// Full differential-geometric state of a discrete closed curve.
///
/// Per-node fields are indexed like the curve samples. `kappa_derivs[m]`
/// holds kappa_{s^m}, with `kappa_derivs[0]` equal to kappa itself.
struct GeometryCache {
  std::vector<double> ds_weight;  // |gamma_u|
  std::vector<double> tangent_x, tangent_y;
  std::vector<double> normal_x, normal_y;  // left rotation of the tangent
  std::vector<std::vector<double>> kappa_derivs;

  double length = 0.0;
  double area = 0.0;
  double iso_ratio = 0.0;  // L^2 / (4 pi A), +inf when A <= 0
  int omega = 0;
  double omega_residual = 0.0;  // (1/2pi) int kappa ds - omega
  double kappa_bar = 0.0;
  double k_osc = 0.0;
  std::vector<double> deriv_norms;  // int kappa_{s^m}^2 ds, m = 0..m_max

  std::size_t size() const noexcept { return ds_weight.size(); }
  int m_max() const noexcept { return static_cast<int>(kappa_derivs.size()) - 1; }
  std::span<const double> kappa() const noexcept { return kappa_derivs.front(); }
  /// kappa_{s^m}; throws InvalidInput when m exceeds m_max.
  std::span<const double> kappa_s(int m) const;
  double min_kappa() const noexcept;
  double max_abs_kappa() const noexcept;

  /// int f ds over the curve.
  double integral(std::span<const double> f) const;
};

/// Throws DegenerateParametrization when some |gamma_u| is not positive.
GeometryCache derive_geometry(const ClosedCurve& curve,
                              const GeometryOptions& options = {});

inline GeometryCache derive_geometry(const ClosedCurve& curve, int m_max) {
  GeometryOptions options;
  options.m_max = m_max;
  return derive_geometry(curve, options);
}

/// order-th arclength derivative of a per-node field, using the same
/// round-off filter as derive_geometry.
std::vector<double> arclength_derivative(const GeometryCache& cache,
                                         std::span<const double> f, int order,
                                         double filter_tolerance = 1e-13);

struct WindingNumber {
  int omega = 0;
  double residual = 0.0;
};

/// Nearest integer to (1/2pi) int kappa ds. Throws UnderResolved when the
/// rounding residual exceeds 1e-3.
WindingNumber winding_number(const GeometryCache& cache);

struct Multiplicity {
  int value = 1;
  /// Two intersection clusters came within 2 delta_x of merging, so the
  /// count depends on the clustering tolerance.
  bool ambiguous = false;
  std::size_t crossings = 0;  // intersecting non-adjacent segment pairs
};

/// Maximum number of passes of the closed sample polyline through any single
/// point, with intersection points clustered within L/(10N). 1 when embedded.
Multiplicity max_multiplicity(const ClosedCurve& curve);

struct EmbeddednessVerdict {
  bool holds = false;
  double lhs = 0.0;  // m^2
  double rhs = 0.0;  // (K_osc + 4 omega^2 pi^2) / 16
  double k_osc = 0.0;
};

/// Checks m^2 <= (K_osc + 4 omega^2 pi^2)/16 for a measured multiplicity m.
EmbeddednessVerdict embeddedness_bound_check(const GeometryCache& cache, int m);

/// Oscillation threshold 64 - 4 pi^2 below which a winding-one curve must
/// be embedded.
double embeddedness_threshold() noexcept;

/// Reparametrizes to uniform arclength, keeping node 0 fixed.
/// Returns the parameter values u_j at which the input was resampled.
struct Reparametrization {
  ClosedCurve curve;
  std::vector<double> parameter;
};
Reparametrization reparametrize_by_arclength(const ClosedCurve& curve);

/// Evaluates the trigonometric interpolant of each coordinate at `parameter`.
ClosedCurve resample_curve(const ClosedCurve& curve,
                           std::span<const double> parameter);

}  // namespace polyflow::geometry
