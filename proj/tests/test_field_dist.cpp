#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "rfcw/field_dist.hpp"

using namespace rfcw;

TEST_CASE("make_distribution parses every kind") {
  const auto d = make_distribution("dirac 0.0");
  CHECK(d.kind() == FieldKind::dirac);
  REQUIRE(d.atoms().size() == 1);
  CHECK(d.atoms()[0].point == 0.0);
  CHECK(d.atoms()[0].weight == 1.0);

  const auto tp = make_distribution("two_point 0.3 0.5");
  REQUIRE(tp.atoms().size() == 2);
  CHECK(tp.atoms()[0].point == -0.3);
  CHECK(tp.atoms()[1].point == 0.3);
  CHECK(tp.atoms()[0].weight == 0.5);
  CHECK(tp.is_symmetric());

  const auto g = make_distribution("gaussian 0.1 0.5");
  CHECK(g.kind() == FieldKind::gaussian);
  CHECK(g.second_moment() == doctest::Approx(0.01 + 0.25).epsilon(1e-10));

  const auto disc = make_distribution("discrete [-1, 0.5, 2] [0.25,0.5,0.25]");
  CHECK(disc.atoms().size() == 3);
  CHECK(disc.mean() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("make_distribution rejects invalid specs") {
  CHECK_THROWS_AS(make_distribution("discrete [1] [0.9]"), std::invalid_argument);
  CHECK_THROWS_AS(make_distribution("discrete [1,2] [1.5,-0.5]"), std::invalid_argument);
  CHECK_THROWS_AS(make_distribution("gaussian 0 0"), std::invalid_argument);
  CHECK_THROWS_AS(make_distribution("gaussian 0 -1"), std::invalid_argument);
  CHECK_THROWS_AS(make_distribution("cauchy 0 1"), std::invalid_argument);
  CHECK_THROWS_AS(make_distribution("two_point 0.3 1.5"), std::invalid_argument);
  CHECK_THROWS_AS(make_distribution("two_point -0.3 0.5"), std::invalid_argument);
  CHECK_THROWS_AS(make_distribution("dirac"), std::invalid_argument);
  CHECK_THROWS_AS(make_distribution("dirac abc"), std::invalid_argument);
  CHECK_THROWS_AS(make_distribution(""), std::invalid_argument);
  CHECK_THROWS_AS(make_distribution("empirical /nonexistent/file"), std::invalid_argument);
}

TEST_CASE("describe round-trips through the parser") {
  for (const char* spec : {"dirac 0.2", "two_point 0.3 0.7", "gaussian -0.1 0.4", "discrete [0.1,0.2] [0.3,0.7]"}) {
    const auto d = make_distribution(spec);
    const auto again = make_distribution(d.describe());
    CHECK(again.describe() == d.describe());
    REQUIRE(again.atoms().size() == d.atoms().size());
    for (std::size_t i = 0; i < d.atoms().size(); ++i) {
      CHECK(again.atoms()[i].point == d.atoms()[i].point);
      CHECK(again.atoms()[i].weight == d.atoms()[i].weight);
    }
  }
}

TEST_CASE("empirical law from a file") {
  const char* path = "rfcw_test_fields.txt";
  {
    std::ofstream out(path);
    out << "0.5\n-0.25\n0.5\n1.0\n";
  }
  const auto d = make_distribution(std::string("empirical ") + path);
  std::remove(path);
  REQUIRE(d.atoms().size() == 3);
  CHECK(d.atoms()[2].point == 1.0);
  CHECK(d.atoms()[1].weight == 0.5);
  CHECK(d.mean() == doctest::Approx(0.4375).epsilon(1e-15));
}

TEST_CASE("expect_lncosh examples") {
  CHECK(expect_lncosh(make_distribution("dirac 0.0"), 1.0, 0.0) == 0.0);
  const double h = 0.37;
  const double beta = 1.3;
  CHECK(expect_lncosh(FieldDistribution::two_point(h, 0.5), beta, 0.0) ==
        doctest::Approx(std::log(std::cosh(beta * h))).epsilon(1e-15));
  CHECK_THROWS_AS(expect_lncosh(make_distribution("dirac 0"), 1.0, std::nan("")), std::invalid_argument);
}

TEST_CASE("Gaussian ln cosh expectation against sampling and a fine trapezoid rule") {
  const auto nu = make_distribution("gaussian 0 1");
  const double value = expect_lncosh(nu, 1.0, 0.0);

  std::mt19937_64 gen(12345);
  std::normal_distribution<double> z;
  const std::size_t samples = 10'000'000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = std::log(std::cosh(z(gen)));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sum_sq / samples - mean * mean) / samples);
  CHECK(std::abs(value - mean) < 4.0 * se);
  CHECK(std::abs(value - mean) < 5e-4 * mean);

  // Trapezoid rule is spectrally accurate for this smooth, fast-decaying integrand.
  double trap = 0.0;
  const double step = 1e-3;
  for (double x = -14.0; x <= 14.0 + 1e-12; x += step) {
    trap += std::log(std::cosh(x)) * std::exp(-0.5 * x * x);
  }
  trap *= step / std::sqrt(2.0 * std::numbers::pi);
  CHECK(value == doctest::Approx(trap).epsilon(1e-11));
}

TEST_CASE("expect_tanh_poly examples") {
  const std::vector<double> t = {0.0, 1.0};
  const std::vector<double> t2 = {0.0, 0.0, 1.0};
  CHECK(expect_tanh_poly(make_distribution("dirac 0"), t, 1.7, 0.0) == 0.0);
  CHECK(expect_tanh_poly(make_distribution("dirac 0.2"), t, 1.0, 0.0) == doctest::Approx(std::tanh(0.2)).epsilon(1e-15));
  const double h = 0.4;
  const double beta = 1.1;
  CHECK(expect_tanh_poly(FieldDistribution::two_point(h, 0.5), t2, beta, 0.0) ==
        doctest::Approx(std::pow(std::tanh(beta * h), 2)).epsilon(1e-15));
  CHECK_THROWS_AS(expect_tanh_poly(make_distribution("dirac 0"), std::vector<double>{}, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("atomic expectations equal the finite weighted sum") {
  const auto nu = make_distribution("discrete [-0.7,0.1,0.45] [0.2,0.3,0.5]");
  const std::vector<double> coeffs = {0.5, -1.0, 2.0, 0.25};
  for (double x : {-0.8, -0.1, 0.0, 0.33, 1.2}) {
    double lc = 0.0;
    double tp = 0.0;
    for (const auto& a : nu.atoms()) {
      lc += a.weight * std::log(std::cosh(1.4 * (x + a.point)));
      const double th = std::tanh(1.4 * (x + a.point));
      tp += a.weight * (0.5 - th + 2.0 * th * th + 0.25 * th * th * th);
    }
    CHECK(expect_lncosh(nu, 1.4, x) == doctest::Approx(lc).epsilon(1e-14));
    CHECK(expect_tanh_poly(nu, coeffs, 1.4, x) == doctest::Approx(tp).epsilon(1e-14));
  }
}

TEST_CASE("ln cosh expectation is even for symmetric laws") {
  for (const char* spec : {"two_point 0.3 0.5", "gaussian 0 0.5", "discrete [-0.2,0,0.2] [0.3,0.4,0.3]", "dirac 0"}) {
    const auto nu = make_distribution(spec);
    CHECK(nu.is_symmetric());
    for (int i = 0; i <= 40; ++i) {
      const double x = 0.05 * i;
      CHECK(std::abs(expect_lncosh(nu, 1.2, x) - expect_lncosh(nu, 1.2, -x)) < 1e-12);
    }
  }
  CHECK_FALSE(make_distribution("two_point 0.3 0.7").is_symmetric());
}

TEST_CASE("sample_fields examples and determinism") {
  const auto dirac = sample_fields(make_distribution("dirac 0.5"), 4, 99);
  CHECK(dirac.values == std::vector<double>{0.5, 0.5, 0.5, 0.5});

  const auto nu = FieldDistribution::two_point(1.0, 0.5);
  const std::size_t n = 100000;
  const auto r = sample_fields(nu, n, 7);
  double mean = 0.0;
  for (double v : r.values) mean += v;
  mean /= static_cast<double>(n);
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));

  const auto again = sample_fields(nu, n, 7);
  CHECK(again.values == r.values);
  const auto prefix = sample_fields(nu, 1000, 7);
  CHECK(std::equal(prefix.values.begin(), prefix.values.end(), r.values.begin()));
  CHECK(sample_fields(nu, 1000, 8).values != prefix.values);

  CHECK_THROWS_AS(sample_fields(nu, 0, 1), std::invalid_argument);
}

TEST_CASE("sampled moments approach the law's moments") {
  const std::size_t n = 200000;
  for (const char* spec : {"gaussian 0.2 0.7", "discrete [-1,0,2] [0.2,0.5,0.3]", "two_point 0.4 0.8"}) {
    const auto nu = make_distribution(spec);
    const auto r = sample_fields(nu, n, 31);
    double m1 = 0.0;
    double m2 = 0.0;
    for (double v : r.values) {
      m1 += v;
      m2 += v * v;
    }
    m1 /= static_cast<double>(n);
    m2 /= static_cast<double>(n);
    const double sd = std::sqrt(nu.second_moment() - nu.mean() * nu.mean());
    CHECK(std::abs(m1 - nu.mean()) < 4.0 * sd / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(m2 - nu.second_moment()) < 0.02 * std::max(1.0, nu.second_moment()));
  }
}

TEST_CASE("empirical law of a realization") {
  const auto r = sample_fields(make_distribution("two_point 0.3 0.5"), 1000, 5);
  const auto law = to_distribution(r);
  CHECK(law.kind() == FieldKind::empirical);
  CHECK(law.atoms().size() == 2);
  double mean = 0.0;
  for (double v : r.values) mean += v;
  CHECK(law.mean() == doctest::Approx(mean / 1000.0).epsilon(1e-14));
}
