#include "rfcw/rate_theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rfcw/log_math.hpp"

namespace rfcw {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Results in [-1e-10, 0) are rounding noise around a zero of a nonnegative rate.
double clamp_rate(double r) { return (r < 0.0 && r >= -1e-10) ? 0.0 : r; }

}  // namespace

RateSpec RateSpec::make(int k, double lambda, double beta) {
  if (k < 1) throw std::invalid_argument("RateSpec: k must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("RateSpec: lambda must be > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("RateSpec: beta must be > 0");
  if (k == 1 && !(lambda < beta)) throw std::invalid_argument("RateSpec: k = 1 needs lambda < beta");
  return {k, lambda, beta};
}

RateSpec RateSpec::from_minimum(const MinimumInfo& info, double beta) {
  return make(info.type, info.strength, beta);
}

double RateSpec::sigma2() const {
  if (k != 1) throw std::logic_error("RateSpec: sigma^2 is defined for k = 1 only");
  return 1.0 / lambda - 1.0 / beta;
}

double mdp_rate(const RateSpec& spec, double x) {
  if (spec.k == 1) {
    if (!(spec.lambda < spec.beta)) throw std::invalid_argument("mdp_rate: k = 1 needs lambda < beta");
    return x * x / (2.0 * spec.sigma2());
  }
  return hs_rate(spec.k, spec.lambda, x);
}

double hs_rate(int k, double lambda, double x) {
  if (k < 1) throw std::invalid_argument("hs_rate: k must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("hs_rate: lambda must be > 0");
  return lambda * std::pow(x, 2 * k) / factorial(2 * k);
}

double gaussian_transfer_rate(double lambda, double beta, double y) {
  if (!(lambda > 0.0) || !(beta > 0.0)) throw std::invalid_argument("gaussian_transfer_rate: parameters must be > 0");
  if (!(lambda < beta)) throw std::invalid_argument("gaussian_transfer_rate: supremum is infinite for lambda >= beta");
  const auto objective = [&](double x) {
    const double d = x - y;
    return hs_rate(1, lambda, x) - 0.5 * beta * d * d;
  };
  const double reach = std::max(1.0, 2.0 * std::abs(y));
  return clamp_rate(detail::maximize_unimodal(objective, y - reach, y + reach, 1e-3));
}

LdpRate::LdpRate(GFunction g) : g_(std::move(g)), inf_g_(kInf) {
  for (double m : find_minima(g_)) inf_g_ = std::min(inf_g_, g_.value(m));
}

double LdpRate::operator()(double x) const {
  if (!(std::abs(x) <= 1.0)) throw std::invalid_argument("ldp_rate: |x| must be <= 1");
  const double beta = g_.beta();
  // y -> G(y) - beta (x - y)^2 / 2 is concave: its derivative beta (x - E tanh) is decreasing.
  const auto objective = [&](double y) {
    const double d = x - y;
    return g_.value(y) - 0.5 * beta * d * d;
  };
  const double sup = detail::maximize_unimodal(objective, -2.0, 2.0, 1e-3);
  return clamp_rate(sup - inf_g_);
}

double ldp_rate(const GFunction& g, double x) { return LdpRate(g)(x); }

ScalingInfo scaling(int k, double alpha, double n) {
  if (k < 1 || k > 8) throw std::invalid_argument("scaling: k must lie in [1, 8]");
  ScalingInfo info;
  info.k = k;
  info.alpha = alpha;
  info.alpha_min = 1.0 - 1.0 / (2.0 * (2.0 * k - 1.0));
  info.clt_exponent = info.alpha_min;
  if (!(alpha > info.alpha_min && alpha < 1.0)) {
    throw std::invalid_argument("scaling: alpha must lie in (" + std::to_string(info.alpha_min) + ", 1)");
  }
  info.speed_exponent = 1.0 - 2.0 * k * (1.0 - alpha);
  info.speed = std::pow(n, info.speed_exponent);
  return info;
}

namespace detail {

double maximize_unimodal(const std::function<double(double)>& f, double lo, double hi, double step,
                         double tol, int max_widen) {
  for (int widen = 0;; ++widen) {
    const auto count = static_cast<long>(std::ceil((hi - lo) / step));
    const double h = (hi - lo) / static_cast<double>(count);
    long best = 0;
    double best_value = -kInf;
    for (long i = 0; i <= count; ++i) {
      const double v = f(lo + h * static_cast<double>(i));
      if (v > best_value) {
        best_value = v;
        best = i;
      }
    }
    const bool on_edge = best == 0 || best == count;
    if (on_edge && widen < max_widen) {
      const double width = hi - lo;
      if (best == 0) lo -= width; else hi += width;
      step *= 2.0;
      continue;
    }
    // Golden-section search on the two cells around the best grid point.
    double a = lo + h * static_cast<double>(std::max<long>(best - 1, 0));
    double b = lo + h * static_cast<double>(std::min(best + 1, count));
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = f(d);
      }
    }
    return std::max({best_value, fc, fd, f(0.5 * (a + b))});
  }
}

}  // namespace detail
}  // namespace rfcw
