#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical kernels.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = a > b ? a : b;
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

/// log P(S_n = -n + 2i) by enumerating all 2^n configurations.
inline std::vector<double> brute_force_log_pmf(const std::vector<double>& h, double beta) {
  const std::size_t n = h.size();
  std::vector<double> acc(n + 1, -std::numeric_limits<double>::infinity());
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    long s = 0;
    double field = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int spin = (mask >> i) & 1U ? 1 : -1;
      s += spin;
      field += spin * h[i];
    }
    const double energy = beta * static_cast<double>(s * s) / (2.0 * static_cast<double>(n)) + beta * field;
    const auto idx = static_cast<std::size_t>((s + static_cast<long>(n)) / 2);
    acc[idx] = log_add(acc[idx], energy);
  }
  double z = -std::numeric_limits<double>::infinity();
  for (double v : acc) z = log_add(z, v);
  for (double& v : acc) v -= z;
  return acc;
}

/// Root of f on [lo, hi] by plain bisection (f(lo), f(hi) of opposite sign).
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Positive solution of m = tanh(beta (m + h)) for beta > 1, h >= 0.
inline double curie_weiss_magnetization(double beta, double h = 0.0) {
  return bisect([&](double m) { return m - std::tanh(beta * (m + h)); }, 1e-9, 1.0);
}

/// Five-point central difference.
inline double derivative(const std::function<double(double)>& f, double x, double step = 1e-3) {
  return (-f(x + 2 * step) + 8 * f(x + step) - 8 * f(x - step) + f(x - 2 * step)) / (12 * step);
}

}  // namespace oracle
