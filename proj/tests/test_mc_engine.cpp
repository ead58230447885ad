#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "rfcw/exact_engine.hpp"
#include "rfcw/mc_engine.hpp"

using namespace rfcw;

namespace {

ChainConfig config(double beta, FieldRealization fields, std::size_t sweeps, std::size_t burn_in, std::size_t thin,
                   std::uint64_t seed) {
  ChainConfig cfg;
  cfg.beta = beta;
  cfg.fields = std::move(fields);
  cfg.sweeps = sweeps;
  cfg.burn_in = burn_in;
  cfg.thin = thin;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("near-zero beta gives fair independent spins") {
  const std::size_t n = 64;
  const auto cfg = config(1e-12, sample_fields(make_distribution("dirac 0.3"), n, 0), 20010, 10, 1, 5);
  const auto s = run_glauber(cfg);
  REQUIRE(s.size() == 20000);
  double mean = 0.0;
  for (auto v : s) mean += v;
  mean /= static_cast<double>(s.size());
  CHECK(std::abs(mean) < 4.0 * std::sqrt(static_cast<double>(n)) / std::sqrt(static_cast<double>(s.size())));
}

TEST_CASE("runs are deterministic and independent of the worker count") {
  const auto cfg = config(1.1, sample_fields(make_distribution("two_point 0.3 0.5"), 50, 8), 400, 20, 3, 17);
  CHECK(run_glauber(cfg) == run_glauber(cfg));
  set_max_threads(1);
  const auto serial = run_glauber_chains(cfg, 5);
  set_max_threads(4);
  const auto parallel = run_glauber_chains(cfg, 5);
  set_max_threads(1);
  CHECK(serial == parallel);
  CHECK(serial.size() == 5 * cfg.retained());
  // Chain 0 of the batch is the single-chain run.
  const auto single = run_glauber(cfg);
  CHECK(std::equal(single.begin(), single.end(), serial.begin()));
  auto other_seed = cfg;
  other_seed.seed = 18;
  CHECK(run_glauber(other_seed) != single);
}

TEST_CASE("chain configuration validation") {
  const auto fields = sample_fields(make_distribution("dirac 0"), 10, 0);
  CHECK_THROWS_AS(run_glauber(config(1.0, fields, 10, 10, 1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(run_glauber(config(1.0, fields, 20, 10, 0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(run_glauber(config(0.0, fields, 20, 10, 1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(run_glauber(config(1.0, FieldRealization{}, 20, 10, 1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(run_glauber_chains(config(1.0, fields, 20, 10, 1, 0), 0), std::invalid_argument);
}

TEST_CASE("empirical_pmf of simple series") {
  const std::vector<std::int32_t> constant(50, 6);
  const auto a = empirical_pmf(constant, 6);
  CHECK(a.probability[6] == 1.0);
  CHECK(a.log_p[6] == 0.0);
  CHECK(a.upper_bound_only[0]);
  CHECK(a.log_p[0] < 0.0);
  CHECK(a.log_p[0] > std::log(1.0 / 50.0) - 1.0);

  const std::vector<std::int32_t> split = {-2, 2, 2, 2};
  const auto b = empirical_pmf(split, 4);
  CHECK(b.probability[1] == 0.25);
  CHECK(b.probability[3] == 0.75);
  CHECK(b.counts[3] == 3);
  CHECK_FALSE(b.upper_bound_only[3]);

  CHECK_THROWS_AS(empirical_pmf(std::vector<std::int32_t>{3}, 4), std::invalid_argument);
  CHECK_THROWS_AS(empirical_pmf(std::vector<std::int32_t>{6}, 4), std::invalid_argument);
  CHECK_THROWS_AS(empirical_pmf(std::vector<std::int32_t>{}, 4), std::invalid_argument);
}

TEST_CASE("histogram matches the exact law") {
  const std::size_t n = 100;
  const auto fields = sample_fields(make_distribution("two_point 0.3 0.5"), n, 42);
  const auto exact = exact_log_pmf(fields, 1.2);
  const auto cfg = config(1.2, fields, 100 + 25000 * 5, 100, 5, 42);
  const auto samples = run_glauber_chains(cfg, 4);
  REQUIRE(samples.size() == 100000);
  const auto est = empirical_pmf(samples, n);
  CHECK(total_variation(est, exact) < 0.02);

  std::size_t bins = 0;
  std::size_t within = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    if (est.counts[i] < 5) continue;
    ++bins;
    if (std::abs(est.probability[i] - std::exp(exact.log_p[i])) <= 3.0 * est.std_error[i]) ++within;
  }
  CHECK(bins > 20);
  CHECK(static_cast<double>(within) >= 0.99 * static_cast<double>(bins));
}

TEST_CASE("single-site transitions satisfy detailed balance") {
  const std::vector<double> h = {0.3, -0.2, 0.1, 0.5};
  const double beta = 1.5;
  const std::size_t n = h.size();
  const std::size_t states = std::size_t{1} << n;

  std::vector<double> weight(states);
  double z = 0.0;
  for (std::size_t mask = 0; mask < states; ++mask) {
    long s = 0;
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int spin = (mask >> i) & 1U ? 1 : -1;
      s += spin;
      f += spin * h[i];
    }
    weight[mask] = std::exp(beta * static_cast<double>(s * s) / (2.0 * n) + beta * f);
    z += weight[mask];
  }
  for (auto& w : weight) w /= z;

  GlauberChain chain(beta, h, 123);
  const auto encode = [&] {
    std::size_t mask = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (chain.spins()[i] > 0) mask |= std::size_t{1} << i;
    }
    return mask;
  };
  for (int i = 0; i < 1000; ++i) chain.update();
  const std::size_t steps = 2'000'000;
  std::vector<std::vector<double>> count(states, std::vector<double>(states, 0.0));
  std::vector<double> visits(states, 0.0);
  std::size_t bad_magnetization = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t a = encode();
    chain.update();
    const std::size_t b = encode();
    long s = 0;
    for (auto v : chain.spins()) s += v;
    if (s != chain.magnetization()) ++bad_magnetization;
    count[a][b] += 1.0;
    visits[a] += 1.0;
  }
  CHECK(bad_magnetization == 0);
  for (std::size_t a = 0; a < states; ++a) {
    CHECK(std::abs(visits[a] / steps - weight[a]) < 0.01);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t b = a ^ (std::size_t{1} << i);
      // Heat-bath kernel: pick site i, set it to the value of b with probability pi(b) / (pi(a) + pi(b)).
      const double kernel = weight[b] / (weight[a] + weight[b]) / static_cast<double>(n);
      const double estimate = count[a][b] / visits[a];
      const double se = std::sqrt(kernel * (1.0 - kernel) / visits[a]);
      CHECK(std::abs(estimate - kernel) < 5.0 * se + 1e-4);
      const double flow = count[a][b] + count[b][a];
      CHECK(std::abs(count[a][b] - count[b][a]) < 5.0 * std::sqrt(flow) + 5.0);
    }
  }
}
