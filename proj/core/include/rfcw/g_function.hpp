#pragma once

#include <string_view>
#include <vector>

#include "rfcw/field_dist.hpp"

namespace rfcw {

inline constexpr int kMaxDerivativeOrder = 16;
/// All critical points of G lie in (-1, 1) because |E tanh| < 1.
inline constexpr double kDefaultSearchBound = 2.0;

/// Coefficients (ascending in t) of Q_n with d^n/dx^n ln cosh(b(x+h)) = b^n Q_n(tanh(b(x+h))).
/// Q_1(t) = t, Q_{n+1}(t) = Q_n'(t) (1 - t^2). Exact integer coefficients.
/// Throws std::invalid_argument unless 1 <= order <= 16.
std::vector<double> q_polynomial(int order);

/// G(x) = (beta/2) x^2 - E_nu[ln cosh(beta (x + h))].
///
/// Built from an empirical law (see from_realization) this is the finite
/// volume function G_n^h of a fixed field realization.
class GFunction {
 public:
  GFunction(double beta, FieldDistribution nu);
  static GFunction from_realization(double beta, const FieldRealization& fields);

  double beta() const { return beta_; }
  const FieldDistribution& field() const { return nu_; }

  double value(double x) const;
  /// Order 0..16.
  double derivative(int order, double x) const;

 private:
  double beta_;
  FieldDistribution nu_;
};

double g_deriv(const GFunction& g, int order, double x);

/// Local minima of G in [-bound, bound], ascending.
///
/// A grid scan of G' (step 1e-3, zero on the grid) brackets every sign
/// change from - to +; each bracket is refined by safeguarded Newton. Grid
/// points where G' vanishes exactly are kept as they are.
/// Throws std::runtime_error when G' does not point outward at the bound.
std::vector<double> find_minima(const GFunction& g, double search_bound = kDefaultSearchBound);

struct MinimumInfo {
  double location = 0.0;
  int type = 1;                  // k
  double strength = 0.0;         // lambda = G^(2k)(m)
  double height = 0.0;           // G(m) - inf G
  double broadness = 0.0;        // +inf for global minima
  double cond_radius = 0.0;      // 0 when the MDP condition fails
  bool is_global = false;
  bool mdp_condition_ok = false;  // beta > 2 height / broadness^2
};

/// Classifies a local minimum m. `all_minima` is the output of find_minima
/// for the same function (it supplies inf G and the neighbouring minima).
/// Throws std::runtime_error when no even derivative up to order 16 is
/// nonzero, or when the first nonzero derivative is odd or negative.
MinimumInfo classify_minimum(const GFunction& g, double m, const std::vector<double>& all_minima);
MinimumInfo classify_minimum(const GFunction& g, double m);

enum class Phase { paramagnetic, ferromagnetic, first_order, second_order, tricritical, other };

std::string_view to_string(Phase phase);

struct PhaseClassification {
  Phase phase = Phase::other;
  std::vector<MinimumInfo> minima;  // global minima only
};

/// Minima whose height is below this are treated as global.
inline constexpr double kGlobalHeightTol = 1e-10;

PhaseClassification classify_phase(const GFunction& g);

/// All local minima with their classification, ascending by location.
std::vector<MinimumInfo> analyze_minima(const GFunction& g);

}  // namespace rfcw
