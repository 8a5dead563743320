#pragma once

#include <cstddef>
#include <functional>

namespace gbh {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;          // Gauss-Kronrod error estimate
  std::size_t intervals = 0;
  bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod on a finite [lo, hi]. Bisects
/// the interval with the largest error estimate until the summed estimate
/// drops below max(abs_tol, rel_tol * |value|) or `max_intervals` is hit.
QuadResult integrate_gk15(const std::function<double(double)>& f, double lo, double hi, double rel_tol = 1e-10,
                          double abs_tol = 0.0, std::size_t max_intervals = 2000);

}  // namespace gbh
