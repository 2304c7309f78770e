#pragma once

#include <functional>
#include <span>

namespace gpb {

struct QuadratureTolerance {
  double absolute = 1e-10;
  double relative = 1e-10;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod integral of f over [lo, hi], split at the given
/// interior breakpoints (discontinuities of f). hi may be +infinity.
/// Throws std::runtime_error if the error estimate misses the tolerance.
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureTolerance& tol = {},
                           std::span<const double> breakpoints = {});

}  // namespace gpb
