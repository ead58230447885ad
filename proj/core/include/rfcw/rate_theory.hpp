#pragma once

#include <functional>

#include "rfcw/g_function.hpp"

namespace rfcw {

/// Parameters of the moderate-deviation rate at a minimum of type k and
/// strength lambda.
struct RateSpec {
  int k = 1;
  double lambda = 0.0;
  double beta = 0.0;

  /// Throws std::invalid_argument for k < 1, lambda <= 0, beta <= 0, or
  /// k == 1 with lambda >= beta (the variance below would not be positive).
  static RateSpec make(int k, double lambda, double beta);
  static RateSpec from_minimum(const MinimumInfo& info, double beta);

  /// 1/lambda - 1/beta, defined for k == 1 only.
  double sigma2() const;
};

/// x^2 / (2 sigma^2) for k = 1, lambda x^(2k) / (2k)! for k >= 2.
double mdp_rate(const RateSpec& spec, double x);

/// lambda x^(2k) / (2k)!, the rate of the Gaussian-smoothed variable.
double hs_rate(int k, double lambda, double x);

/// sup_x { lambda x^2 / 2 - beta (x - y)^2 / 2 } evaluated numerically by
/// grid scan and golden-section refinement; equals y^2 / (2 sigma^2) when
/// lambda < beta. Throws std::invalid_argument when lambda >= beta (the
/// supremum is infinite).
double gaussian_transfer_rate(double lambda, double beta, double y);

/// Large-deviation rate of S_n / n:
/// sup_y { G(y) - beta (x - y)^2 / 2 } - inf G.
/// The supremum is taken on a 1e-3 grid over [-2, 2] (widened while the
/// maximiser sits on the edge) and polished by golden-section search.
class LdpRate {
 public:
  explicit LdpRate(GFunction g);
  /// Throws std::invalid_argument for |x| > 1.
  double operator()(double x) const;
  double inf_g() const { return inf_g_; }

 private:
  GFunction g_;
  double inf_g_;
};

double ldp_rate(const GFunction& g, double x);

struct ScalingInfo {
  int k = 1;
  double alpha = 0.0;
  double speed_exponent = 0.0;  // 1 - 2k(1 - alpha)
  double alpha_min = 0.0;       // 1 - 1/(2(2k - 1))
  double clt_exponent = 0.0;    // same as alpha_min
  double speed = 0.0;           // n^speed_exponent
};

/// Throws std::invalid_argument unless 1 <= k <= 8 and alpha lies in (alpha_min, 1).
ScalingInfo scaling(int k, double alpha, double n);

namespace detail {

/// Maximum of a unimodal function: grid scan on [lo, hi] with the given step,
/// the range (and step) doubled while the best grid point is on an edge (at most
/// `max_widen` times), then golden-section refinement to `tol`.
double maximize_unimodal(const std::function<double(double)>& f, double lo, double hi, double step,
                         double tol = 1e-10, int max_widen = 12);

}  // namespace detail

}  // namespace rfcw
