#include "rfcw/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "rfcw/exact_engine.hpp"

namespace rfcw {
namespace {

std::atomic<unsigned> g_max_threads{1};

}  // namespace

void set_max_threads(unsigned threads) { g_max_threads = std::max(1u, threads); }
unsigned max_threads() { return g_max_threads.load(); }

void ChainConfig::validate() const {
  if (fields.size() == 0) throw std::invalid_argument("ChainConfig: empty field realization");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("ChainConfig: beta must be > 0");
  if (sweeps <= burn_in) throw std::invalid_argument("ChainConfig: sweeps must exceed burn_in");
  if (thin == 0) throw std::invalid_argument("ChainConfig: thin must be >= 1");
}

GlauberChain::GlauberChain(double beta, std::span<const double> fields, std::uint64_t seed,
                           std::uint64_t stream)
    : beta_(beta), rng_(derive_key(seed, stream + 1)) {
  beta_fields_.reserve(fields.size());
  for (double h : fields) beta_fields_.push_back(beta * h);
  spins_.resize(fields.size());
  for (auto& s : spins_) {
    s = rng_.uniform_at(counter_++) < 0.5 ? std::int8_t{-1} : std::int8_t{1};
    magnetization_ += s;
  }
}

void GlauberChain::update() {
  const std::size_t n = spins_.size();
  const auto i = static_cast<std::size_t>(rng_.below_at(counter_++, n));
  const double u = rng_.uniform_at(counter_++);
  const long rest = magnetization_ - spins_[i];
  const double field = beta_ * static_cast<double>(rest) / static_cast<double>(n) + beta_fields_[i];
  const double p_up = 1.0 / (1.0 + std::exp(-2.0 * field));
  const std::int8_t next = u < p_up ? std::int8_t{1} : std::int8_t{-1};
  magnetization_ += next - spins_[i];
  spins_[i] = next;
}

void GlauberChain::sweep() {
  for (std::size_t k = 0; k < spins_.size(); ++k) update();
}

namespace {

std::vector<std::int32_t> run_one(const ChainConfig& cfg, std::uint64_t stream) {
  GlauberChain chain(cfg.beta, cfg.fields.values, cfg.seed, stream);
  for (std::size_t s = 0; s < cfg.burn_in; ++s) chain.sweep();
  std::vector<std::int32_t> out;
  out.reserve(cfg.retained());
  for (std::size_t r = 0; r < cfg.retained(); ++r) {
    for (std::size_t t = 0; t < cfg.thin; ++t) chain.sweep();
    out.push_back(static_cast<std::int32_t>(chain.magnetization()));
  }
  return out;
}

}  // namespace

std::vector<std::int32_t> run_glauber(const ChainConfig& cfg) {
  cfg.validate();
  return run_one(cfg, 0);
}

std::vector<std::int32_t> run_glauber_chains(const ChainConfig& cfg, std::size_t chains) {
  cfg.validate();
  if (chains == 0) throw std::invalid_argument("run_glauber_chains: chains must be >= 1");
  std::vector<std::vector<std::int32_t>> results(chains);
  const std::size_t workers = std::min<std::size_t>(chains, max_threads());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < chains; c = next++) results[c] = run_one(cfg, c);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  std::vector<std::int32_t> out;
  for (const auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

EmpiricalPMF empirical_pmf(std::span<const std::int32_t> samples, std::size_t n) {
  if (samples.empty()) throw std::invalid_argument("empirical_pmf: no samples");
  if (n == 0) throw std::invalid_argument("empirical_pmf: n must be >= 1");
  EmpiricalPMF out;
  out.n = n;
  out.samples = samples.size();
  out.counts.assign(n + 1, 0);
  const long ln = static_cast<long>(n);
  for (std::int32_t s : samples) {
    if (s < -ln || s > ln || ((s + ln) % 2) != 0) {
      throw std::invalid_argument("empirical_pmf: sample " + std::to_string(s) + " is not a valid magnetization");
    }
    ++out.counts[static_cast<std::size_t>((s + ln) / 2)];
  }
  const double total = static_cast<double>(samples.size());
  const double z2 = 1.0;
  out.probability.resize(n + 1);
  out.log_p.resize(n + 1);
  out.std_error.resize(n + 1);
  out.upper_bound_only.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double p = static_cast<double>(out.counts[i]) / total;
    const double denom = 1.0 + z2 / total;
    const double centre = (p + z2 / (2.0 * total)) / denom;
    const double half = std::sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total)) / denom;
    out.probability[i] = p;
    out.std_error[i] = half;
    out.upper_bound_only[i] = out.counts[i] == 0;
    out.log_p[i] = out.counts[i] == 0 ? std::log(centre + half) : std::log(p);
  }
  return out;
}

double total_variation(const EmpiricalPMF& estimate, const LogPMF& exact) {
  if (estimate.n != exact.n) throw std::invalid_argument("total_variation: size mismatch");
  double tv = 0.0;
  for (std::size_t i = 0; i <= exact.n; ++i) tv += std::abs(estimate.probability[i] - std::exp(exact.log_p[i]));
  return 0.5 * tv;
}

}  // namespace rfcw
