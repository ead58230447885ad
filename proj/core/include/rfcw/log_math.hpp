#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace rfcw {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
inline double log_add_exp(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == kNegInf) return kNegInf;
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kNegInf;
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi == kNegInf) return kNegInf;
  if (hi == kInf) return kInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

// Streaming log-sum-exp; keeps a running maximum so long sums stay exact.
class LogSumAccumulator {
 public:
  void add(double v) {
    if (v == kNegInf) return;
    if (v <= max_) {
      sum_ += std::exp(v - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    }
  }
  double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

// ln cosh(x) accurate for all finite x.
inline double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace rfcw
