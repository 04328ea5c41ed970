#pragma once

#include <cstddef>

namespace pwlcycle {

// All numerical thresholds in one place. Defaults are the values the test
// suites are written against.
struct Tolerances {
  // |a12L*b1R - a12R*b1L| <= sewing_rel * max(|a12L*b1R|, |a12R*b1L|)
  double sewing_rel = 1e-12;

  // Bisection on y1 (half-map) and on y0 (lambda endpoint) stops once the
  // bracket is narrower than root_rel * (|lo| + |hi|). Zero means "until the
  // midpoint is no longer representable".
  double root_rel = 0.0;

  // |4D - T^2| below this times max(1, T^2) is handled as a repeated root.
  double discriminant_rel = 1e-20;

  // Displacement zero accepted when |delta| < cycle_residual * (1 + y0).
  double cycle_residual = 1e-11;

  // Zero of delta is "simple" when |F| > simple_zero * (1 + |c0|+|c1|+|c2|).
  double simple_zero = 1e-10;

  // Zero scan of delta.
  std::size_t scan_points = 512;
  double scan_cap = 1e6;
  double scan_cap_max = 1e12;

  // Flow oracle.
  double oracle_time_cap = 1e6;
  double spectrum_rel = 1e-12;

  // Absolute tolerance of the adaptive quadrature used by the T-sensitivity.
  double quadrature_abs = 1e-12;
};

} // namespace pwlcycle
