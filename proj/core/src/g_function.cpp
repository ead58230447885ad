#include "rfcw/g_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "rfcw/log_math.hpp"

namespace rfcw {
namespace {

constexpr double kGridStep = 1e-3;
constexpr double kDuplicateTol = 1e-9;
constexpr double kBroadnessStep = 1e-3;
constexpr double kBroadnessTol = 1e-10;

std::vector<std::vector<double>> build_q_table() {
  std::vector<std::vector<std::int64_t>> exact(kMaxDerivativeOrder + 1);
  exact[1] = {0, 1};
  for (int n = 1; n < kMaxDerivativeOrder; ++n) {
    const auto& q = exact[n];
    // derivative, then multiply by (1 - t^2)
    std::vector<std::int64_t> dq(q.size() > 1 ? q.size() - 1 : 1, 0);
    for (std::size_t i = 1; i < q.size(); ++i) dq[i - 1] = static_cast<std::int64_t>(i) * q[i];
    std::vector<std::int64_t> next(dq.size() + 2, 0);
    for (std::size_t i = 0; i < dq.size(); ++i) {
      next[i] += dq[i];
      next[i + 2] -= dq[i];
    }
    while (next.size() > 1 && next.back() == 0) next.pop_back();
    exact[n + 1] = std::move(next);
  }
  std::vector<std::vector<double>> table(kMaxDerivativeOrder + 1);
  for (int n = 1; n <= kMaxDerivativeOrder; ++n) {
    table[n].assign(exact[n].begin(), exact[n].end());
  }
  return table;
}

const std::vector<std::vector<double>>& q_table() {
  static const auto table = build_q_table();
  return table;
}

// Root of G' in [lo, hi] with G'(lo) < 0 < G'(hi).
double refine_root(const GFunction& g, double lo, double hi) {
  double x = 0.5 * (lo + hi);
  double best = x;
  double best_abs = kInf;
  for (int iter = 0; iter < 200; ++iter) {
    const double d1 = g.derivative(1, x);
    if (std::abs(d1) < best_abs) {
      best_abs = std::abs(d1);
      best = x;
    }
    if (d1 == 0.0) return x;
    if (d1 < 0.0) lo = x; else hi = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
    const double d2 = g.derivative(2, x);
    double next = d2 > 0.0 ? x - d1 / d2 : 0.5 * (lo + hi);
    // Newton steps that leave the bracket or stall fall back to bisection.
    if (!(next > lo && next < hi) || std::abs(next - x) > 0.5 * (hi - lo)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  return best;
}

double derivative_zero_tol(double beta, int order) {
  return 1e-7 * std::max(1.0, std::pow(beta, order));
}

}  // namespace

std::vector<double> q_polynomial(int order) {
  if (order < 1 || order > kMaxDerivativeOrder) {
    throw std::invalid_argument("q_polynomial: order must lie in [1, 16]");
  }
  return q_table()[order];
}

GFunction::GFunction(double beta, FieldDistribution nu) : beta_(beta), nu_(std::move(nu)) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("GFunction: beta must be > 0");
}

GFunction GFunction::from_realization(double beta, const FieldRealization& fields) {
  return GFunction(beta, to_distribution(fields));
}

double GFunction::value(double x) const {
  return 0.5 * beta_ * x * x - expect_lncosh(nu_, beta_, x);
}

double GFunction::derivative(int order, double x) const {
  if (!std::isfinite(x)) throw std::invalid_argument("g_deriv: non-finite x");
  if (order < 0 || order > kMaxDerivativeOrder) throw std::invalid_argument("g_deriv: order must lie in [0, 16]");
  if (order == 0) return value(x);
  const double scale = std::pow(beta_, order);
  const double e = expect_tanh_poly(nu_, q_table()[order], beta_, x);
  switch (order) {
    case 1: return beta_ * x - scale * e;
    case 2: return beta_ - scale * e;
    default: return -scale * e;
  }
}

double g_deriv(const GFunction& g, int order, double x) { return g.derivative(order, x); }

std::vector<double> find_minima(const GFunction& g, double search_bound) {
  if (!(search_bound > 0.0)) throw std::invalid_argument("find_minima: search bound must be > 0");
  const auto steps = static_cast<long>(std::ceil(search_bound / kGridStep));
  const double bound = static_cast<double>(steps) * kGridStep;
  if (!(g.derivative(1, -bound) < 0.0) || !(g.derivative(1, bound) > 0.0)) {
    throw std::runtime_error("find_minima: G' has roots outside the search bound; enlarge it");
  }

  std::vector<double> minima;
  double prev_x = -bound;
  double prev_d = g.derivative(1, prev_x);
  double zero_x = 0.0;
  bool pending_zero = false;  // exact zero after a negative value
  for (long i = -steps + 1; i <= steps; ++i) {
    const double x = static_cast<double>(i) * kGridStep;
    const double d = g.derivative(1, x);
    if (d == 0.0) {
      if (prev_d < 0.0) {
        pending_zero = true;
        zero_x = x;
      }
      continue;  // prev_d keeps the last nonzero sign
    }
    if (prev_d < 0.0 && d > 0.0) {
      minima.push_back(pending_zero ? zero_x : refine_root(g, prev_x, x));
    }
    pending_zero = false;
    prev_x = x;
    prev_d = d;
  }

  std::sort(minima.begin(), minima.end());
  std::vector<double> unique;
  for (double m : minima) {
    if (unique.empty() || m - unique.back() > kDuplicateTol) unique.push_back(m);
  }
  return unique;
}

MinimumInfo classify_minimum(const GFunction& g, double m, const std::vector<double>& all_minima) {
  const double beta = g.beta();
  MinimumInfo info;
  info.location = m;

  int type = 0;
  for (int order = 2; order <= kMaxDerivativeOrder; ++order) {
    const double d = g.derivative(order, m);
    if (std::abs(d) < derivative_zero_tol(beta, order)) continue;
    if (order % 2 == 1) throw std::runtime_error("classify_minimum: first nonzero derivative is odd; not a minimum");
    if (d < 0.0) throw std::runtime_error("classify_minimum: leading even derivative is negative; not a minimum");
    type = order / 2;
    info.strength = d;
    break;
  }
  if (type == 0) throw std::runtime_error("classify_minimum: classification depth exceeded (order 16)");
  info.type = type;

  const double gm = g.value(m);
  double inf_g = gm;
  for (double other : all_minima) inf_g = std::min(inf_g, g.value(other));
  info.height = gm - inf_g;
  if (info.height <= kGlobalHeightTol) info.height = 0.0;
  info.is_global = info.height == 0.0;

  // Nearest strictly-lower point, marching outward on both sides.
  info.broadness = kInf;
  if (!info.is_global) {
    const double bound = kDefaultSearchBound + std::max({1.0, std::abs(m)});
    for (double dir : {-1.0, 1.0}) {
      double inside = 0.0;
      for (double r = kBroadnessStep; r <= bound; r += kBroadnessStep) {
        if (r >= info.broadness) break;
        if (g.value(m + dir * r) < gm) {
          double lo = inside;
          double hi = r;
          while (hi - lo > kBroadnessTol) {
            const double mid = 0.5 * (lo + hi);
            if (g.value(m + dir * mid) < gm) hi = mid; else lo = mid;
          }
          info.broadness = std::min(info.broadness, hi);
          break;
        }
        inside = r;
      }
    }
  }

  info.mdp_condition_ok = std::isinf(info.broadness) || beta > 2.0 * info.height / (info.broadness * info.broadness);

  double nearest_other = kInf;
  for (double other : all_minima) {
    if (std::abs(other - m) > kDuplicateTol) nearest_other = std::min(nearest_other, std::abs(other - m));
  }
  if (info.mdp_condition_ok) {
    const double cap = std::isinf(info.broadness)
                           ? kInf
                           : 0.5 * (info.broadness - std::sqrt(2.0 * info.height / beta));
    info.cond_radius = std::min(cap, nearest_other);
  } else {
    info.cond_radius = 0.0;
  }
  return info;
}

MinimumInfo classify_minimum(const GFunction& g, double m) {
  return classify_minimum(g, m, find_minima(g));
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::paramagnetic: return "paramagnetic";
    case Phase::ferromagnetic: return "ferromagnetic";
    case Phase::first_order: return "first_order";
    case Phase::second_order: return "second_order";
    case Phase::tricritical: return "tricritical";
    case Phase::other: return "other";
  }
  return "other";
}

std::vector<MinimumInfo> analyze_minima(const GFunction& g) {
  const auto minima = find_minima(g);
  std::vector<MinimumInfo> out;
  out.reserve(minima.size());
  for (double m : minima) out.push_back(classify_minimum(g, m, minima));
  return out;
}

PhaseClassification classify_phase(const GFunction& g) {
  PhaseClassification result;
  for (auto& info : analyze_minima(g)) {
    if (info.is_global) result.minima.push_back(info);
  }
  const auto& mins = result.minima;
  const bool all_type1 = std::all_of(mins.begin(), mins.end(), [](const MinimumInfo& i) { return i.type == 1; });
  if (mins.size() == 1) {
    switch (mins.front().type) {
      case 1: result.phase = Phase::paramagnetic; break;
      case 2: result.phase = Phase::second_order; break;
      case 3: result.phase = Phase::tricritical; break;
      default: result.phase = Phase::other; break;
    }
  } else if (mins.size() == 2 && all_type1) {
    result.phase = Phase::ferromagnetic;
  } else if (mins.size() > 2 && all_type1) {
    result.phase = Phase::first_order;
  } else {
    result.phase = Phase::other;
  }
  return result;
}

}  // namespace rfcw
