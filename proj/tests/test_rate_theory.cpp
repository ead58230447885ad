#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "rfcw/rate_theory.hpp"

using namespace rfcw;

TEST_CASE("mdp_rate examples") {
  const auto spec = RateSpec::make(1, 1.66726, 2.0);
  CHECK(mdp_rate(spec, 0.0) == 0.0);
  CHECK(spec.sigma2() == doctest::Approx(0.09979).epsilon(1e-4));
  CHECK(mdp_rate(spec, 1.0) == doctest::Approx(5.0105).epsilon(1e-4));

  const double m = oracle::curie_weiss_magnetization(2.0);
  const double sigma2 = (1.0 - m * m) / (1.0 - 2.0 * (1.0 - m * m));
  const auto exact = RateSpec::make(1, 2.0 - 4.0 * (1.0 - m * m), 2.0);
  CHECK(exact.sigma2() == doctest::Approx(sigma2).epsilon(1e-12));

  CHECK(mdp_rate(RateSpec::make(2, 12.0, 1.0), 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(RateSpec::make(1, 2.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(RateSpec::make(1, 3.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(RateSpec::make(0, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(RateSpec::make(2, 0.0, 2.0), std::invalid_argument);
  CHECK_NOTHROW(RateSpec::make(2, 5.0, 2.0));
  CHECK_THROWS_AS(RateSpec::make(2, 5.0, 2.0).sigma2(), std::logic_error);
}

TEST_CASE("mdp_rate is even and strictly increasing on the positive axis") {
  for (const auto& spec : {RateSpec::make(1, 0.4, 0.8), RateSpec::make(2, 2.0, 1.0), RateSpec::make(3, 9.0, 1.5)}) {
    double prev = 0.0;
    for (int i = 1; i <= 60; ++i) {
      const double x = 0.05 * i;
      const double r = mdp_rate(spec, x);
      CHECK(r == mdp_rate(spec, -x));
      CHECK(r > prev);
      prev = r;
    }
  }
}

TEST_CASE("hs_rate examples") {
  CHECK(hs_rate(1, 2.0, 0.0) == 0.0);
  CHECK(hs_rate(1, 2.0, 1.0) == 1.0);
  CHECK(hs_rate(3, 720.0, 2.0) == doctest::Approx(64.0).epsilon(1e-15));
  CHECK_THROWS_AS(hs_rate(1, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("inf-convolution of the smoothed rate gives the deviation rate") {
  for (const auto& [lambda, beta] : {std::pair{0.5, 1.0}, {1.0, 2.0}, {1.66, 2.0}, {0.2, 0.8}, {2.5, 3.0}}) {
    const auto spec = RateSpec::make(1, lambda, beta);
    for (int i = 0; i <= 60; ++i) {
      const double y = -3.0 + 0.1 * i;
      CHECK(std::abs(gaussian_transfer_rate(lambda, beta, y) - mdp_rate(spec, y)) < 1e-8);
    }
  }
  CHECK_THROWS_AS(gaussian_transfer_rate(2.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("ldp_rate of the zero-field model against its stationary point") {
  const double beta = 0.5;
  const GFunction g(beta, FieldDistribution::dirac(0.0));
  for (double x : {0.1, 0.5, -0.7, 0.95}) {
    // The objective's derivative is beta (x - tanh(beta y)).
    const double y = std::atanh(x) / beta;
    const double expect = 0.5 * beta * y * y - std::log(std::cosh(beta * y)) - 0.5 * beta * (x - y) * (x - y);
    CHECK(std::abs(ldp_rate(g, x) - expect) < 1e-9);
  }
  CHECK_THROWS_AS(ldp_rate(g, 1.01), std::invalid_argument);
}

TEST_CASE("ldp_rate against a dense grid supremum") {
  const GFunction g(1.2, make_distribution("two_point 0.3 0.5"));
  const double inf_g = std::min(g.value(0.0), g.value(find_minima(g).back()));
  for (double x : {-0.6, 0.1, 0.5}) {
    double best = -INFINITY;
    for (int i = 0; i <= 800000; ++i) {
      const double y = -8.0 + 2e-5 * i;
      best = std::max(best, g.value(y) - 0.6 * (x - y) * (x - y));
    }
    CHECK(std::abs(ldp_rate(g, x) - (best - inf_g)) < 1e-8);
  }
}

TEST_CASE("ldp_rate is nonnegative and vanishes exactly at the global minimisers") {
  for (const auto& [spec, beta] : {std::pair{"dirac 0", 2.0}, {"two_point 0.3 0.5", 1.2}, {"dirac 0.2", 0.8},
                                   {"dirac 0.05", 2.0}}) {
    const GFunction g(beta, make_distribution(spec));
    const LdpRate rate(g);
    const auto phase = classify_phase(g);
    for (const auto& info : phase.minima) CHECK(rate(info.location) < 1e-10);
    for (int i = 0; i <= 100; ++i) {
      const double x = -1.0 + 0.02 * i;
      const double r = rate(x);
      CHECK(r >= 0.0);
      double distance = INFINITY;
      for (const auto& info : phase.minima) distance = std::min(distance, std::abs(x - info.location));
      if (distance > 1e-6 && distance > 0.02) CHECK(r > 0.0);
    }
  }
}

TEST_CASE("scaling examples") {
  CHECK(scaling(1, 0.75, 1.0).alpha_min == 0.5);
  CHECK(scaling(2, 0.9, 1.0).alpha_min == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(scaling(3, 0.95, 1.0).alpha_min == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(scaling(1, 0.75, 1e4).speed == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(scaling(3, 0.95, 1.0).clt_exponent == doctest::Approx(0.9).epsilon(1e-15));
  CHECK_THROWS_AS(scaling(1, 0.5, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(scaling(2, 0.8, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(scaling(1, 1.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(scaling(9, 0.99, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(scaling(0, 0.75, 10.0), std::invalid_argument);
}

TEST_CASE("speed exponent identities") {
  for (double alpha = 0.51; alpha < 1.0; alpha += 0.04) {
    CHECK(scaling(1, alpha, 1.0).speed_exponent == doctest::Approx(2.0 * alpha - 1.0).epsilon(1e-14));
  }
  for (int k = 1; k <= 8; ++k) {
    const double amin = 1.0 - 1.0 / (2.0 * (2.0 * k - 1.0));
    for (double alpha : {amin + 1e-9, 0.5 * (amin + 1.0), 1.0 - 1e-9}) {
      const double e = scaling(k, alpha, 1.0).speed_exponent;
      CHECK(e > 0.0);
      CHECK(e < 1.0);
    }
  }
}
