#pragma once

// Seeded random inequality suites and the oracle-versus-pipeline battery.

#include <cstdint>
#include <string>
#include <vector>

namespace polyflow::verification {

struct InequalitySuite {
  double period = 1.0;
  std::size_t trials = 0;
  std::size_t wirtinger_violations = 0;
  std::size_t sup_violations = 0;
  std::size_t false_equalities = 0;  // equality flagged on a non-first-harmonic input
  double worst_wirtinger_ratio = 0.0;  // ratio / bound
  double worst_sup_ratio = 0.0;        // sup / bound
  double equality_error = 0.0;  // |ratio - P^2/4pi^2| for cos(2 pi x / P)
  bool equality_flagged = false;
  bool passed() const;
};

/// `trials` random mean-zero trigonometric polynomials with 1..20 modes on a
/// 128-point grid, for one period.
InequalitySuite run_inequality_suite(double period, std::size_t trials, std::uint64_t seed);

struct OracleRow {
  std::string shape;
  std::string quantity;
  double pipeline = 0.0;
  double oracle = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Spectral L, A, kappa and K_osc against quadrature and closed forms;
/// shoelace area and finite-difference curvature against the pipeline with
/// their second-order convergence; Jacobian eigenvalues at the circle
/// against the linearized mode rates.
std::vector<OracleRow> oracle_battery(std::size_t n = 256);

/// Jacobian rows only: worst relative eigenvalue mismatch for k <= n/8.
std::vector<OracleRow> jacobian_battery(int p, double r, std::size_t n);

}  // namespace polyflow::verification
