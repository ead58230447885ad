#include "rfcw/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rfcw {
namespace {

constexpr int kOrder = 16;

struct GaussLegendreRule {
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};
};

// Newton iteration on P_16 from Chebyshev-like starting guesses.
GaussLegendreRule make_rule() {
  GaussLegendreRule rule;
  for (int i = 0; i < kOrder; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= kOrder; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = kOrder * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

const GaussLegendreRule& rule() {
  static const GaussLegendreRule instance = make_rule();
  return instance;
}

}  // namespace

double gauss_legendre(const std::function<double(double)>& f, double lo, double hi, int panels) {
  const auto& r = rule();
  const double width = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    const double half = 0.5 * width;
    const double mid = a + half;
    double panel_sum = 0.0;
    for (int i = 0; i < kOrder; ++i) panel_sum += r.weights[i] * f(mid + half * r.nodes[i]);
    total += half * panel_sum;
  }
  return total;
}

QuadratureResult gaussian_expectation(const std::function<double(double)>& f, double mean,
                                      double sd, double tol) {
  constexpr double kCut = 12.0;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto integrand = [&](double z) { return f(mean + sd * z) * norm * std::exp(-0.5 * z * z); };

  QuadratureResult result;
  int panels = 8;
  double previous = gauss_legendre(integrand, -kCut, kCut, panels);
  while (panels < 4096) {
    panels *= 2;
    const double current = gauss_legendre(integrand, -kCut, kCut, panels);
    const double change = std::abs(current - previous);
    if (!std::isfinite(current)) throw std::runtime_error("gaussian quadrature: non-finite integrand");
    if (change < tol * std::max(1.0, std::abs(current))) {
      result.value = current;
      result.last_change = change;
      result.panels = panels;
      return result;
    }
    previous = current;
  }
  throw std::runtime_error("gaussian quadrature did not converge");
}

}  // namespace rfcw
