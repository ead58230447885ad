#include "rfcw/exact_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rfcw/g_function.hpp"

namespace rfcw {

LogPMF exact_log_pmf(const FieldRealization& fields, double beta) {
  const std::size_t n = fields.size();
  if (n == 0) throw std::invalid_argument("exact_log_pmf: empty realization");
  if (n > kMaxExactSize) throw std::invalid_argument("exact_log_pmf: n exceeds 2^20");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("exact_log_pmf: beta must be > 0");

  // row[i] = log P_indep(S_j = -j + 2 i); updated in place from the top so
  // row[i - 1] still holds the previous row when row[i] is rewritten.
  std::vector<double> row(n + 1, kNegInf);
  row[0] = 0.0;
  double log_offset = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double a = beta * fields.values[j - 1];
    const double log_norm = log_cosh(a) + std::numbers::ln2;
    const double log_up = a - log_norm;
    const double log_down = -a - log_norm;
    row[j] = row[j - 1] + log_up;
    for (std::size_t i = j - 1; i > 0; --i) {
      row[i] = log_add_exp(row[i - 1] + log_up, row[i] + log_down);
    }
    row[0] += log_down;
    log_offset += log_norm;
  }

  LogPMF pmf;
  pmf.n = n;
  pmf.beta = beta;
  pmf.fields = fields;
  pmf.log_p.resize(n + 1);
  const double inv_2n = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = static_cast<double>(LogPMF::magnetization(n, i));
    pmf.log_p[i] = beta * s * s * inv_2n + row[i];
  }
  const double total = log_sum_exp(pmf.log_p);
  for (double& v : pmf.log_p) {
    v -= total;
    if (!std::isfinite(v)) throw std::runtime_error("exact_log_pmf: non-finite log-probability");
  }
  pmf.log_Z = total + log_offset;
  return pmf;
}

double interval_log_prob(const LogPMF& pmf, double m, double alpha, Interval event,
                         std::optional<Interval> condition) {
  const double n = static_cast<double>(pmf.n);
  const double scale = std::pow(n, alpha);
  LogSumAccumulator joint;
  LogSumAccumulator cond;
  for (std::size_t i = 0; i <= pmf.n; ++i) {
    const double s = static_cast<double>(pmf.magnetization(i));
    if (condition && !condition->contains(s / n)) continue;
    cond.add(pmf.log_p[i]);
    if (event.contains((s - n * m) / scale)) joint.add(pmf.log_p[i]);
  }
  if (!condition) return joint.value();
  const double denominator = cond.value();
  if (denominator == kNegInf) throw std::domain_error("interval_log_prob: conditioning event has probability zero");
  return joint.value() - denominator;
}

namespace {

// log of the trapezoid integral of exp(f) over [a, b] with step at most h.
template <class F>
double log_trapezoid(const F& f, double a, double b, double h) {
  if (!(b > a)) return kNegInf;
  const auto steps = static_cast<std::size_t>(std::ceil((b - a) / h));
  const double dx = (b - a) / static_cast<double>(steps);
  LogSumAccumulator acc;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    acc.add(f(a + dx * static_cast<double>(i)) + std::log(w * dx));
  }
  return acc.value();
}

}  // namespace

HSDensity hs_log_density(const FieldRealization& fields, double beta, double m, double alpha,
                         std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("hs_log_density: grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("hs_log_density: grid must be strictly increasing");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("hs_log_density: alpha must lie in (0, 1)");

  const double n = static_cast<double>(fields.size());
  const GFunction g = GFunction::from_realization(beta, fields);
  const auto exponent = [&](double x) { return -n * g.value(x); };

  const auto minima = find_minima(g);
  double peak = kNegInf;
  for (double x : minima) peak = std::max(peak, exponent(x));

  // The integrand is a mixture of bumps no narrower than 1/sqrt(n beta) since G'' <= beta.
  const double step = 1.0 / (8.0 * std::sqrt(n * beta));
  double lo = minima.front();
  double hi = minima.back();
  while (exponent(lo) > peak - 40.0) lo -= 8.0 * step;
  while (exponent(hi) > peak - 40.0) hi += 8.0 * step;

  double log_mass = log_trapezoid(exponent, lo, hi, step);
  for (int iter = 0;; ++iter) {
    if (iter == 60) throw std::domain_error("hs_log_density: normalisation did not converge");
    const double extra = 0.2 * (hi - lo);
    const double wider = log_trapezoid(exponent, lo - extra, hi + extra, step);
    lo -= extra;
    hi += extra;
    const double increment = wider - log_mass;
    log_mass = wider;
    if (increment < 1e-12) break;
  }

  const double scale = std::pow(n, alpha - 1.0);  // x = m + scale * s
  const double span_lo = std::max(lo, m + scale * grid.front());
  const double span_hi = std::min(hi, m + scale * grid.back());
  const double inside = log_trapezoid(exponent, span_lo, span_hi, step);
  const double outside = -std::expm1(inside - log_mass);
  if (!(outside <= 1e-10)) {
    throw std::domain_error("hs_log_density: grid too narrow, tail mass outside the grid exceeds 1e-10");
  }

  HSDensity out;
  out.m = m;
  out.alpha = alpha;
  out.grid.assign(grid.begin(), grid.end());
  out.gauss_variance = std::pow(n, 1.0 - 2.0 * alpha) / beta;
  out.log_normalizer = log_mass - std::log(scale);
  out.log_density.reserve(grid.size());
  for (double s : grid) out.log_density.push_back(exponent(m + scale * s) - out.log_normalizer);
  return out;
}

std::vector<double> gaussian_convolve(const LogPMF& pmf, double m, double alpha,
                                      std::span<const double> eval_points) {
  const double n = static_cast<double>(pmf.n);
  const double scale = std::pow(n, alpha);
  const double variance = std::pow(n, 1.0 - 2.0 * alpha) / pmf.beta;
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * variance);

  std::vector<double> centers(pmf.n + 1);
  for (std::size_t i = 0; i <= pmf.n; ++i) {
    centers[i] = (static_cast<double>(pmf.magnetization(i)) - n * m) / scale;
  }
  std::vector<double> out;
  out.reserve(eval_points.size());
  for (double y : eval_points) {
    if (!std::isfinite(y)) throw std::invalid_argument("gaussian_convolve: non-finite evaluation point");
    LogSumAccumulator acc;
    for (std::size_t i = 0; i <= pmf.n; ++i) {
      const double d = y - centers[i];
      acc.add(pmf.log_p[i] + log_norm - d * d / (2.0 * variance));
    }
    out.push_back(acc.value());
  }
  return out;
}

}  // namespace rfcw
