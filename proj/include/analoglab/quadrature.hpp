#pragma once

#include <functional>

namespace analoglab::quadrature {

struct AdaptiveSimpsonResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

/// Adaptive Simpson with interval bisection and Richardson correction.
/// The absolute tolerance is split evenly between the two halves at every
/// bisection. Every interval is bisected at least `min_depth` times before
/// the error test may accept it, so narrow features between the first five
/// samples are not skipped. Throws ToleranceNotMet when an interval still
/// fails the test at `max_depth`.
AdaptiveSimpsonResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                       double tol, int min_depth = 3, int max_depth = 48);

}  // namespace analoglab::quadrature
