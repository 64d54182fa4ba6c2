#pragma once

// Periodic calculus on uniform grids through the trigonometric interpolant.
//
// Samples live on u_j = j/N, j = 0..N-1, period 1 unless a different period
// is passed explicitly. Coefficients follow f(u) = sum_k c_k exp(2 pi i k u)
// with the real-input half spectrum k = 0..N/2 stored; the Nyquist term is
// interpreted as c_{N/2} cos(pi N u).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace polyflow::spectral {

using Complex = std::complex<double>;

/// Validated scalar samples of a period-1 function on a uniform grid.
class PeriodicSamples {
 public:
  static constexpr std::size_t kMinSize = 16;

  /// Throws InvalidInput unless N >= 16, N even and every value finite.
  explicit PeriodicSamples(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t j) const noexcept { return values_[j]; }

  /// Grid node u_j = j/N.
  double node(std::size_t j) const noexcept {
    return static_cast<double>(j) / static_cast<double>(values_.size());
  }

  /// Samples of a callable on the uniform grid.
  template <typename F>
  static PeriodicSamples sample(std::size_t n, F&& f) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) {
      v[j] = f(static_cast<double>(j) / static_cast<double>(n));
    }
    return PeriodicSamples(std::move(v));
  }

 private:
  std::vector<double> values_;
};

/// Half spectrum of real periodic samples (normalised by 1/N).
class Spectrum {
 public:
  /// Forward transform of N real samples (N even, >= 2).
  static Spectrum of(std::span<const double> samples);

  std::size_t grid_size() const noexcept { return n_; }
  std::span<const Complex> coefficients() const noexcept { return c_; }
  std::span<Complex> coefficients() noexcept { return c_; }

  /// Order-th derivative for a function of the given period.
  /// The Nyquist coefficient is zeroed for odd orders.
  Spectrum derivative(int order, double period = 1.0) const;

  /// Back to N grid values.
  std::vector<double> samples() const;

  /// Zero every k >= 1 coefficient whose magnitude is below `threshold`.
  /// Returns the number of coefficients removed.
  std::size_t drop_below(double threshold);

  /// Zeroes the Nyquist coefficient.
  void drop_nyquist() noexcept { c_.back() = 0.0; }

  /// Largest |c_k| over k >= 1 (the mean is excluded).
  double max_oscillatory_magnitude() const noexcept;

  /// Trigonometric interpolant at an arbitrary parameter value.
  double evaluate(double u) const noexcept;

 private:
  Spectrum(std::size_t n, std::vector<Complex> c) : n_(n), c_(std::move(c)) {}

  std::size_t n_ = 0;
  std::vector<Complex> c_;
};

// --- raw-span kernels used by the geometry and flow modules -----------------

/// Derivative of the band-limited interpolant. Throws InvalidInput on
/// non-finite samples or negative order.
std::vector<double> differentiate(std::span<const double> f, int order,
                                  double period = 1.0);

/// Mean-zero antiderivative F of f - mean(f), i.e. F' = f - mean(f).
std::vector<double> antiderivative(std::span<const double> f,
                                   double period = 1.0);

/// (1/N) sum f_j w_j: the trapezoid rule for int_0^1 f w du.
double integrate(std::span<const double> f, std::span<const double> w);

/// (1/N) sum f_j.
double mean(std::span<const double> f);

/// Values of the trigonometric interpolant of f at arbitrary parameters.
std::vector<double> interpolate(std::span<const double> f,
                                std::span<const double> at);

/// Spectral zero-padding from N to M >= N grid points (M even).
std::vector<double> refine(std::span<const double> f, std::size_t m);

/// Keeps the lowest N modes of samples on an M-point grid.
std::vector<double> restrict_to(std::span<const double> f, std::size_t n);

/// Pointwise product. With `dealias` the factors are zero-padded to the
/// 3/2 grid first and the product truncated back to N modes.
std::vector<double> product(std::span<const double> f,
                            std::span<const double> g, bool dealias);

/// Removes the Nyquist cosine from samples on an even grid.
std::vector<double> without_nyquist(std::span<const double> f);

/// Sum of |c_k|^2 over the full two-sided spectrum; equals int_0^1 f^2 du.
double spectral_energy(std::span<const double> f);

// --- public operations on validated samples ---------------------------------

PeriodicSamples spectral_derivative(const PeriodicSamples& f, int order);

/// Trapezoid rule on the periodic grid, (1/N) sum f_j w_j.
double periodic_integral(const PeriodicSamples& f,
                         const PeriodicSamples& weight);

/// Evaluates the interpolant of f at `new_parameter`, which must be strictly
/// increasing modulo 1 (a single wrap-around is allowed).
PeriodicSamples resample(const PeriodicSamples& f,
                         const PeriodicSamples& new_parameter);

}  // namespace polyflow::spectral
