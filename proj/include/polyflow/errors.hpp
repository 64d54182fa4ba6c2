#pragma once

#include <stdexcept>
#include <string>

namespace polyflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed numeric input: non-finite samples, size mismatches, bad ranges.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Some |γ_u| fell below the regularity threshold.
class DegenerateParametrization : public Error {
 public:
  explicit DegenerateParametrization(const std::string& what)
      : Error("degenerate parametrization: " + what) {}
};

/// The discrete curve does not resolve its own total curvature.
class UnderResolved : public Error {
 public:
  explicit UnderResolved(const std::string& what)
      : Error("under-resolved curve: " + what) {}
};

/// Raised by the time stepper when the step size collapses or curvature
/// explodes. The flow is never continued past this point.
class SingularitySuspected : public Error {
 public:
  explicit SingularitySuspected(const std::string& what)
      : Error("finite-time singularity suspected: " + what) {}
};

/// A run specification that cannot be executed as written.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

}  // namespace polyflow
