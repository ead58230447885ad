#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rfcw/field_dist.hpp"
#include "rfcw/rng.hpp"

namespace rfcw {

struct LogPMF;

/// Glauber chain parameters. burn_in, sweeps and thin count sweeps
/// (one sweep = n single-site updates); `sweeps` includes the burn-in.
struct ChainConfig {
  double beta = 1.0;
  FieldRealization fields;
  std::size_t sweeps = 0;
  std::size_t burn_in = 10;
  std::size_t thin = 1;
  std::uint64_t seed = 0;

  std::size_t n() const { return fields.size(); }
  std::size_t retained() const { return sweeps > burn_in ? (sweeps - burn_in) / thin : 0; }
  /// Throws std::invalid_argument on an empty realization, beta <= 0,
  /// sweeps <= burn_in or thin == 0.
  void validate() const;
};

/// Random-scan heat-bath dynamics for the Gibbs measure
/// exp(beta S^2/(2n) + beta sum h_i s_i). The conditional law of spin i
/// given the rest is P(+1) = 1 / (1 + exp(-2 beta (S_{-i}/n + h_i))); the
/// i = j self-interaction term is the same for both spin values and cancels.
///
/// Randomness comes from a CounterRng keyed by (seed, stream); each update
/// consumes two counters (site, acceptance).
class GlauberChain {
 public:
  GlauberChain(double beta, std::span<const double> fields, std::uint64_t seed, std::uint64_t stream = 0);

  void update();
  void sweep();

  long magnetization() const { return magnetization_; }
  std::span<const std::int8_t> spins() const { return spins_; }
  std::size_t size() const { return spins_.size(); }

 private:
  double beta_;
  std::vector<double> beta_fields_;
  std::vector<std::int8_t> spins_;
  long magnetization_ = 0;
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

/// Thinned post-burn-in series of S_n. Deterministic given the config.
std::vector<std::int32_t> run_glauber(const ChainConfig& cfg);

/// `chains` independent chains (stream c for chain c), concatenated in chain
/// order. Chains run on up to max_threads() workers; the output does not
/// depend on the worker count.
std::vector<std::int32_t> run_glauber_chains(const ChainConfig& cfg, std::size_t chains);

/// Histogram estimate of the law of S_n with Wilson-interval (z = 1) errors.
struct EmpiricalPMF {
  std::size_t n = 0;
  std::size_t samples = 0;
  std::vector<std::size_t> counts;      // indexed like LogPMF::log_p
  std::vector<double> probability;
  std::vector<double> log_p;            // upper bound for empty bins
  std::vector<double> std_error;
  std::vector<bool> upper_bound_only;   // true for empty bins
};

/// Throws std::invalid_argument on an empty series or a value with the
/// wrong parity or outside [-n, n].
EmpiricalPMF empirical_pmf(std::span<const std::int32_t> samples, std::size_t n);

/// (1/2) sum |p_hat - p|.
double total_variation(const EmpiricalPMF& estimate, const LogPMF& exact);

/// Worker cap for internal parallelism (at least 1).
void set_max_threads(unsigned threads);
unsigned max_threads();

}  // namespace rfcw
