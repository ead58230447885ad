#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfcw/g_function.hpp"

namespace rfcw {

using Json = nlohmann::json;

/// JSON number, or the strings "inf" / "-inf" / "nan" for non-finite values.
Json json_number(double v);

/// Outcome of one experiment. Every report carries the inputs it was run
/// with, so re-running from `inputs` reproduces it exactly.
struct VerificationReport {
  std::string experiment;
  Json inputs = Json::object();
  Json theory = Json::object();
  Json empirical = Json::object();
  Json metrics = Json::object();
  Json tolerances = Json::object();
  bool passed = false;
  double runtime_seconds = 0.0;

  /// Runtime is left out unless asked for, so identical inputs serialise
  /// to identical bytes.
  Json to_json(bool include_runtime = false) const;
};

/// Flat `key = value` configuration; `#` starts a comment.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::string& path);

  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, std::string fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_optional_double(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  /// Comma-separated list.
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::size_t> get_sizes(const std::string& key, std::vector<std::size_t> fallback) const;

  /// Throws std::invalid_argument naming the first key not in `known`.
  void require_known(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> values_;
};

// -- Lemma-level identity checks ------------------------------------------

struct HsConsistencyParams {
  std::size_t n = 200;
  double beta = 1.2;
  std::string nu = "two_point 0.3 0.5";
  std::uint64_t seed = 42;
  double alpha = 0.75;
  std::optional<double> m;  // default: largest global minimum of G
  double s_lo = -12.0;
  double s_hi = 12.0;
  std::size_t points = 2001;
  double tolerance = 1e-6;

  static HsConsistencyParams from_config(const ExperimentConfig& cfg);
};

/// Exact law convolved with the Gaussian versus the closed-form density.
VerificationReport verify_hs_consistency(const HsConsistencyParams& p);

struct UniformConvergenceParams {
  std::string nu = "two_point 0.3 0.5";
  double beta = 1.2;
  std::optional<double> m_hint;  // default: largest global minimum
  double alpha = 0.75;
  std::vector<std::size_t> n_list = {1000, 10000, 100000};
  std::uint64_t seed = 11;
  double s_lo = -3.0;
  double s_hi = 3.0;
  std::size_t s_points = 601;
  double delta = 0.0;  // <= 0: derived from lambda and the next derivative
  double tolerance = 0.05;

  static UniformConvergenceParams from_config(const ExperimentConfig& cfg);
};

/// Rescaled n^{2k(1-a)} (G_n(m + s n^{a-1}) - G_n(m)) against lambda s^{2k}/(2k)!,
/// plus the polynomial lower bound on [-delta n^{1-a}, delta n^{1-a}].
VerificationReport verify_uniform_convergence(const UniformConvergenceParams& p);

struct TransferIdentityParams {
  std::vector<std::pair<double, double>> pairs = {{0.5, 1.0}, {1.0, 2.0}, {1.66, 2.0}, {0.2, 0.8}, {2.5, 3.0}};
  double y_lo = -3.0;
  double y_hi = 3.0;
  std::size_t y_points = 61;
  double tolerance = 1e-8;

  static TransferIdentityParams from_config(const ExperimentConfig& cfg);
};

/// Numeric sup_x { J(x) - beta (x - y)^2 / 2 } against y^2 / (2 sigma^2).
VerificationReport verify_transfer_identity(const TransferIdentityParams& p);

// -- Rate experiments -------------------------------------------------------

enum class RateKind { mdp_conditioned, mdp_unconditioned, ldp };
enum class Engine { exact, mc };

struct RateParams {
  RateKind kind = RateKind::mdp_unconditioned;
  std::string nu = "dirac 0.2";
  double beta = 0.8;
  std::optional<double> m_hint;
  double alpha = 0.75;
  double a = 0.5;  // conditioning half-width for mdp_conditioned
  std::vector<std::size_t> n_list = {2048, 8192, 32768};
  std::vector<double> x_grid = {0.5, 1.0};
  Engine engine = Engine::exact;
  std::uint64_t seed = 1;
  double tolerance = 0.2;
  // mc engine only
  std::size_t mc_sweeps = 20000;
  std::size_t mc_burn_in = 100;
  std::size_t mc_thin = 1;
  std::size_t mc_chains = 4;

  static RateParams from_config(const ExperimentConfig& cfg);
};

/// Empirical -log P / speed against the theoretical rate. For the MDP kinds
/// the event at x is {|X| >= x} with X = (S_n - n m)/n^alpha, i.e. the upper
/// event together with its mirror; the one-sided rates are reported as
/// diagnostics. The LDP kind uses {S_n/n >= x} (or {S_n/n < x} below the
/// minimiser) and compares with the infimum of I over the event.
VerificationReport verify_rate(const RateParams& p);

struct CounterexampleParams {
  double beta = 2.0;
  double alpha = 0.75;
  std::vector<std::size_t> n_list = {16384};
  double a = 0.5;
  double ratio_threshold = 0.05;
  double tolerance = 0.2;

  static CounterexampleParams from_config(const ExperimentConfig& cfg);
};

/// Zero-field Curie-Weiss model below the critical temperature: the
/// unconditioned deviation probability at m decays far slower than the
/// would-be rate 1/(2 sigma^2), the conditioned one does not.
VerificationReport verify_counterexample(const CounterexampleParams& p);

// -- Phase structure of the symmetric dichotomous model -------------------

namespace dichotomous {

/// (2/3) arcosh(sqrt(3/2)).
double tricritical_field_formula();
/// Smallest beta >= 1 with beta (1 - tanh(beta h)^2) = 1 (second-order line).
/// Throws std::domain_error when no such beta exists.
double second_order_beta(double h);
/// Field where G^(4)(0) changes sign along the second-order line.
double tricritical_field();
/// Beta where 0 and +-m are equally deep (first-order line), h > h_c.
double first_order_beta(double h);
/// Critical line f(h) on [0, 1/2).
double critical_beta(double h);

struct ClosedForms {
  double lambda1 = 0.0;  // G''(0)
  double lambda3 = 0.0;  // G''''(0)
  double sigma1_sq = 0.0;
  double lambda4_literal = 0.0;    // as printed, with tanh^8
  double lambda4_corrected = 0.0;  // tanh^6
};
ClosedForms closed_forms_at_zero(double beta, double h);

/// lambda_2 and sigma_2^2 at the positive solution m of 2m = tanh(b(m+h)) + tanh(b(m-h)).
double lambda2(double beta, double h, double m);
double sigma2_sq(double beta, double h, double m);          // 1/lambda_2 - 1/beta in closed form
double sigma2_sq_literal(double beta, double h, double m);  // as printed

}  // namespace dichotomous

struct ClosedFormParams {
  std::vector<std::pair<double, double>> pairs = {  // (beta, h)
      {0.5, 0.1}, {0.8, 0.2}, {0.9, 0.3}, {1.0, 0.45}, {2.0, 0.6},
      {1.2, 0.1}, {1.5, 0.2}, {1.2, 0.3}, {2.0, 0.3}, {1.8, 0.4}};
  double tolerance = 1e-8;

  static ClosedFormParams from_config(const ExperimentConfig& cfg);
};

/// lambda_1, lambda_2, lambda_3, sigma_1^2, sigma_2^2 of the dichotomous
/// model against values built from g_deriv; lambda_4 is reported only.
VerificationReport verify_closed_forms(const ClosedFormParams& p);

struct DerivativeAuditParams {
  std::vector<std::pair<std::string, double>> cases = {  // (nu, beta)
      {"dirac 0", 1.0}, {"dirac 0.2", 1.2}, {"two_point 0.3 0.5", 1.2},
      {"two_point 0.25 0.3", 1.5}, {"gaussian 0.1 0.5", 1.1}};
  int max_order = 6;
  std::size_t points = 50;
  double x_lo = -1.5;
  double x_hi = 1.5;
  double tolerance = 1e-6;

  static DerivativeAuditParams from_config(const ExperimentConfig& cfg);
};

/// g_deriv(order) against a Richardson-extrapolated central difference of g_deriv(order - 1).
VerificationReport verify_derivatives(const DerivativeAuditParams& p);

struct PhaseFormulaParams {
  std::vector<double> h_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.45};
  double f0_tolerance = 1e-6;
  double hc_tolerance = 1e-3;
  ClosedFormParams closed_forms;

  static PhaseFormulaParams from_config(const ExperimentConfig& cfg);
};

/// Critical line, tricritical field and the phase at one point of each regime.
VerificationReport verify_phase_formulas(const PhaseFormulaParams& p);

struct McValidityParams {
  std::size_t n = 100;
  double beta = 1.2;
  std::string nu = "two_point 0.3 0.5";
  std::uint64_t seed = 42;
  std::size_t samples = 100000;
  std::size_t chains = 4;
  std::size_t thin = 5;
  std::size_t burn_in = 100;
  double tolerance = 0.02;

  static McValidityParams from_config(const ExperimentConfig& cfg);
};

/// Glauber histogram against the exact law (total variation).
VerificationReport verify_mc_validity(const McValidityParams& p);

/// Names accepted by run_experiment.
std::vector<std::string> experiment_names();

/// Dispatches on the experiment name; unknown config keys are rejected.
VerificationReport run_experiment(std::string_view name, const ExperimentConfig& cfg);

}  // namespace rfcw
