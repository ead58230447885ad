#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rfcw/field_dist.hpp"
#include "rfcw/log_math.hpp"

namespace rfcw {

/// Largest system the exact engine accepts (O(n^2) time).
inline constexpr std::size_t kMaxExactSize = std::size_t{1} << 20;

/// Exact quenched law of S_n for one field realization.
/// log_p[i] is log P(S_n = -n + 2 i), i = 0..n.
struct LogPMF {
  std::size_t n = 0;
  double beta = 0.0;
  FieldRealization fields;
  std::vector<double> log_p;
  double log_Z = 0.0;

  static constexpr long magnetization(std::size_t n, std::size_t index) {
    return -static_cast<long>(n) + 2 * static_cast<long>(index);
  }
  long magnetization(std::size_t index) const { return magnetization(n, index); }
};

/// Log-space dynamic programme over spins: after j spins the row holds the
/// log-probability of each partial sum under independent spins with fields
/// h_1..h_j, and the Curie-Weiss factor exp(beta s^2 / (2n)) is applied at
/// the end. O(n^2) time, one row of memory.
LogPMF exact_log_pmf(const FieldRealization& fields, double beta);

/// Half-open interval [lo, hi); infinite ends allowed.
struct Interval {
  double lo = kNegInf;
  double hi = kInf;

  static constexpr Interval all() { return {}; }
  static constexpr Interval at_least(double x) { return {x, kInf}; }
  static constexpr Interval below(double x) { return {kNegInf, x}; }
  constexpr bool contains(double x) const { return lo <= x && x < hi; }
};

/// log P((S_n - n m)/n^alpha in event | S_n/n in condition).
/// Throws std::domain_error when the condition has probability zero.
double interval_log_prob(const LogPMF& pmf, double m, double alpha, Interval event,
                         std::optional<Interval> condition = std::nullopt);

/// Density of (S_n - n m)/n^alpha + W/n^(alpha - 1/2), W ~ N(0, 1/beta), in
/// the closed form exp(-n G_n^h(m + n^(alpha-1) s)) / normaliser.
struct HSDensity {
  double m = 0.0;
  double alpha = 0.0;
  std::vector<double> grid;
  std::vector<double> log_density;
  double gauss_variance = 0.0;  // n^(1 - 2 alpha) / beta
  double log_normalizer = 0.0;  // log of the integral over s
};

/// Throws std::invalid_argument for a grid that is not strictly increasing,
/// and std::domain_error when more than 1e-10 of the mass lies outside the
/// grid span.
HSDensity hs_log_density(const FieldRealization& fields, double beta, double m, double alpha,
                         std::span<const double> grid);

/// Same density from the exact law of S_n convolved with the Gaussian.
std::vector<double> gaussian_convolve(const LogPMF& pmf, double m, double alpha,
                                      std::span<const double> eval_points);

}  // namespace rfcw
