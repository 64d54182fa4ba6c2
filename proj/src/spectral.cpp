#include "polyflow/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "polyflow/errors.hpp"

namespace polyflow::spectral {
namespace {

// FFTW plans are created once per size under a lock (the planner is not
// thread-safe) and executed through the new-array interface, which is.
class RealFftPlan {
 public:
  explicit RealFftPlan(std::size_t n) : n_(n) {
    std::vector<double> real(n);
    std::vector<Complex> spec(n / 2 + 1);
    auto* in = real.data();
    auto* out = reinterpret_cast<fftw_complex*>(spec.data());
    const int ni = static_cast<int>(n);
    forward_ = fftw_plan_dft_r2c_1d(ni, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_ = fftw_plan_dft_c2r_1d(ni, out, in, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  RealFftPlan(const RealFftPlan&) = delete;
  RealFftPlan& operator=(const RealFftPlan&) = delete;
  ~RealFftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  void forward(const double* in, Complex* out) const {
    // r2c out-of-place leaves the input untouched.
    fftw_execute_dft_r2c(forward_, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
  }
  // Destroys `in`.
  void backward(Complex* in, double* out) const {
    fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(in), out);
  }

  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

const RealFftPlan& plan_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<RealFftPlan>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFftPlan>(n);
  return *slot;
}

void require_finite(std::span<const double> f, const char* what) {
  for (double v : f) {
    if (!std::isfinite(v)) {
      throw InvalidInput(std::string(what) + ": non-finite sample");
    }
  }
}

void require_even(std::size_t n, const char* what) {
  if (n < 2 || n % 2 != 0) {
    throw InvalidInput(std::string(what) + ": grid size must be even and >= 2, got " +
                       std::to_string(n));
  }
}

std::vector<Complex> forward_coefficients(std::span<const double> f) {
  const auto n = f.size();
  std::vector<Complex> c(n / 2 + 1);
  plan_for(n).forward(f.data(), c.data());
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& v : c) v *= inv;
  return c;
}

std::vector<double> backward_samples(std::vector<Complex> c, std::size_t n) {
  std::vector<double> out(n);
  plan_for(n).backward(c.data(), out.data());
  return out;
}

// (i * 2 pi k / P)^order
Complex derivative_symbol(std::size_t k, int order, double period) {
  const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / period;
  const double mag = std::pow(w, order);
  switch (order % 4) {
    case 0: return {mag, 0.0};
    case 1: return {0.0, mag};
    case 2: return {-mag, 0.0};
    default: return {0.0, -mag};
  }
}

}  // namespace

// ---------------------------------------------------------------------------

PeriodicSamples::PeriodicSamples(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.size() < kMinSize || values_.size() % 2 != 0) {
    throw InvalidInput("periodic samples need an even grid size >= 16, got " +
                       std::to_string(values_.size()));
  }
  require_finite(values_, "periodic samples");
}

Spectrum Spectrum::of(std::span<const double> samples) {
  require_even(samples.size(), "spectrum");
  require_finite(samples, "spectrum");
  return Spectrum(samples.size(), forward_coefficients(samples));
}

Spectrum Spectrum::derivative(int order, double period) const {
  if (order < 0) throw InvalidInput("derivative order must be non-negative");
  std::vector<Complex> d(c_.size());
  for (std::size_t k = 0; k < c_.size(); ++k) {
    d[k] = c_[k] * derivative_symbol(k, order, period);
  }
  if (order % 2 == 1) d.back() = 0.0;
  // The Nyquist term is a cosine; even derivatives keep it real.
  if (order % 2 == 0) d.back() = Complex(d.back().real(), 0.0);
  return Spectrum(n_, std::move(d));
}

std::vector<double> Spectrum::samples() const {
  // FFTW's c2r is unnormalised: f_j = sum over the full spectrum.
  return backward_samples(c_, n_);
}

std::size_t Spectrum::drop_below(double threshold) {
  std::size_t dropped = 0;
  for (std::size_t k = 1; k < c_.size(); ++k) {
    if (c_[k] != Complex(0.0) && std::abs(c_[k]) < threshold) {
      c_[k] = 0.0;
      ++dropped;
    }
  }
  return dropped;
}

double Spectrum::max_oscillatory_magnitude() const noexcept {
  double m = 0.0;
  for (std::size_t k = 1; k < c_.size(); ++k) m = std::max(m, std::abs(c_[k]));
  return m;
}

double Spectrum::evaluate(double u) const noexcept {
  const std::size_t half = n_ / 2;
  double sum = c_[0].real();
  const double angle = 2.0 * std::numbers::pi * u;
  const Complex step = std::polar(1.0, angle);
  Complex phase = step;
  for (std::size_t k = 1; k < half; ++k) {
    sum += 2.0 * (c_[k] * phase).real();
    // Re-anchor periodically to keep the recurrence from drifting.
    if (k % 64 == 63) {
      phase = std::polar(1.0, angle * static_cast<double>(k + 1));
    } else {
      phase *= step;
    }
  }
  sum += c_[half].real() * std::cos(angle * static_cast<double>(half));
  return sum;
}

// ---------------------------------------------------------------------------

std::vector<double> differentiate(std::span<const double> f, int order,
                                  double period) {
  if (order == 0) {
    require_finite(f, "differentiate");
    return {f.begin(), f.end()};
  }
  return Spectrum::of(f).derivative(order, period).samples();
}

std::vector<double> antiderivative(std::span<const double> f, double period) {
  auto spec = Spectrum::of(f);
  auto c = spec.coefficients();
  c[0] = 0.0;
  for (std::size_t k = 1; k + 1 < c.size(); ++k) {
    c[k] /= derivative_symbol(k, 1, period);
  }
  c[c.size() - 1] = 0.0;
  return spec.samples();
}

double integrate(std::span<const double> f, std::span<const double> w) {
  if (f.size() != w.size()) {
    throw InvalidInput("integrate: length mismatch " + std::to_string(f.size()) +
                       " vs " + std::to_string(w.size()));
  }
  if (f.empty()) throw InvalidInput("integrate: empty samples");
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * w[j];
  return s / static_cast<double>(f.size());
}

double mean(std::span<const double> f) {
  if (f.empty()) throw InvalidInput("mean: empty samples");
  double s = 0.0;
  for (double v : f) s += v;
  return s / static_cast<double>(f.size());
}

std::vector<double> interpolate(std::span<const double> f,
                                std::span<const double> at) {
  const auto spec = Spectrum::of(f);
  std::vector<double> out(at.size());
  for (std::size_t j = 0; j < at.size(); ++j) out[j] = spec.evaluate(at[j]);
  return out;
}

std::vector<double> refine(std::span<const double> f, std::size_t m) {
  const auto n = f.size();
  require_even(m, "refine");
  if (m < n) throw InvalidInput("refine: target grid smaller than source");
  if (m == n) return {f.begin(), f.end()};
  const auto c = forward_coefficients(f);
  std::vector<Complex> padded(m / 2 + 1, 0.0);
  for (std::size_t k = 0; k < n / 2; ++k) padded[k] = c[k];
  // The source Nyquist cosine splits evenly between +-N/2.
  padded[n / 2] = 0.5 * c[n / 2].real();
  return backward_samples(std::move(padded), m);
}

std::vector<double> restrict_to(std::span<const double> f, std::size_t n) {
  const auto m = f.size();
  require_even(n, "restrict_to");
  if (n > m) throw InvalidInput("restrict_to: target grid larger than source");
  if (n == m) return {f.begin(), f.end()};
  const auto c = forward_coefficients(f);
  std::vector<Complex> kept(n / 2 + 1);
  for (std::size_t k = 0; k < n / 2; ++k) kept[k] = c[k];
  kept[n / 2] = 2.0 * c[n / 2].real();
  return backward_samples(std::move(kept), n);
}

std::vector<double> product(std::span<const double> f,
                            std::span<const double> g, bool dealias) {
  if (f.size() != g.size()) throw InvalidInput("product: length mismatch");
  const auto n = f.size();
  if (!dealias) {
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = f[j] * g[j];
    return out;
  }
  std::size_t m = (3 * n + 1) / 2;
  if (m % 2 != 0) ++m;
  auto fp = refine(f, m);
  const auto gp = refine(g, m);
  for (std::size_t j = 0; j < m; ++j) fp[j] *= gp[j];
  return restrict_to(fp, n);
}

std::vector<double> without_nyquist(std::span<const double> f) {
  auto spec = Spectrum::of(f);
  auto c = spec.coefficients();
  c[c.size() - 1] = 0.0;
  return spec.samples();
}

double spectral_energy(std::span<const double> f) {
  const auto spec = Spectrum::of(f);
  const auto c = spec.coefficients();
  double e = std::norm(c[0]) + std::norm(c[c.size() - 1]);
  for (std::size_t k = 1; k + 1 < c.size(); ++k) e += 2.0 * std::norm(c[k]);
  return e;
}

// ---------------------------------------------------------------------------

PeriodicSamples spectral_derivative(const PeriodicSamples& f, int order) {
  if (order < 0) throw InvalidInput("derivative order must be non-negative");
  return PeriodicSamples(differentiate(f.values(), order));
}

double periodic_integral(const PeriodicSamples& f,
                         const PeriodicSamples& weight) {
  return integrate(f.values(), weight.values());
}

PeriodicSamples resample(const PeriodicSamples& f,
                         const PeriodicSamples& new_parameter) {
  const auto u = new_parameter.values();
  const auto m = u.size();
  double turns = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double d = u[(j + 1) % m] - u[j];
    d -= std::floor(d);
    if (d <= 0.0) {
      throw InvalidInput("resample: new parameter is not strictly increasing at node " +
                         std::to_string(j));
    }
    turns += d;
  }
  if (std::abs(turns - 1.0) > 1e-9) {
    throw InvalidInput("resample: new parameter does not wind exactly once");
  }
  return PeriodicSamples(interpolate(f.values(), u));
}

}  // namespace polyflow::spectral
