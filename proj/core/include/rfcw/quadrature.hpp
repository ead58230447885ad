#pragma once

#include <functional>
#include <span>

namespace rfcw {

struct QuadratureResult {
  double value = 0.0;
  double last_change = 0.0;
  int panels = 0;
};

/// Composite 16-point Gauss-Legendre rule on [lo, hi].
double gauss_legendre(const std::function<double(double)>& f, double lo, double hi, int panels);

/// E[f(Z)] for Z ~ N(mean, sd^2), truncating at 12 standard deviations and
/// doubling the number of Gauss-Legendre panels until two successive
/// estimates differ by less than tol * max(1, |estimate|).
/// Throws std::runtime_error when 4096 panels do not reach the tolerance.
QuadratureResult gaussian_expectation(const std::function<double(double)>& f, double mean,
                                      double sd, double tol = 1e-12);

}  // namespace rfcw
