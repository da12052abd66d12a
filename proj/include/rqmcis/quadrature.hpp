#pragma once

#include <cstddef>
#include <functional>

namespace rqmcis {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// Bisects the panel with the largest |K15 - G7| until the summed error
/// estimate is below abs_tol. Throws NumericError when max_intervals is
/// reached first or f returns a non-finite value.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, std::size_t max_intervals = 4000);

}  // namespace rqmcis
