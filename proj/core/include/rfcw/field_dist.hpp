#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rfcw {

enum class FieldKind { dirac, two_point, gaussian, discrete, empirical };

std::string_view to_string(FieldKind kind);

struct Atom {
  double point = 0.0;
  double weight = 0.0;
};

/// Marginal law of a single random field h_i.
///
/// Atomic kinds (dirac, two_point, discrete, empirical) are stored as a
/// sorted list of distinct atoms with strictly positive weights, so sums over
/// the law are exact finite sums. Equal points are merged; an empirical law
/// over a realization with few distinct values therefore stays cheap to
/// evaluate no matter how many samples it came from.
///
/// Instances are immutable after construction.
class FieldDistribution {
 public:
  static FieldDistribution dirac(double h);
  /// t * delta_h + (1 - t) * delta_{-h}; requires h >= 0 and t in [0, 1].
  static FieldDistribution two_point(double h, double t);
  static FieldDistribution gaussian(double mean, double sd);
  static FieldDistribution discrete(std::vector<double> points, std::vector<double> weights);
  /// Uniform atomic law over the samples.
  static FieldDistribution empirical(std::span<const double> samples);
  /// Reads a newline-separated list of decimals.
  static FieldDistribution empirical_from_file(const std::string& path);

  FieldKind kind() const { return kind_; }
  bool is_atomic() const { return kind_ != FieldKind::gaussian; }
  std::span<const Atom> atoms() const { return atoms_; }

  double gaussian_mean() const { return mean_; }
  double gaussian_sd() const { return sd_; }

  double mean() const;
  double second_moment() const;

  /// True when the law is invariant under h -> -h (exact for atoms).
  bool is_symmetric() const;
  /// Law of -h.
  FieldDistribution mirrored() const;

  /// Canonical spec text accepted by make_distribution (empirical laws are
  /// rendered as an equivalent `discrete` spec).
  std::string describe() const;

  /// E[f(h)]: a finite weighted sum for atomic laws, adaptive quadrature for
  /// the Gaussian kind (absolute error about 1e-12 relative to max(1, |E f|)).
  double expect(const std::function<double(double)>& f) const;

 private:
  FieldDistribution() = default;
  void finalize_atoms();

  FieldKind kind_ = FieldKind::dirac;
  std::vector<Atom> atoms_;
  double mean_ = 0.0;
  double sd_ = 0.0;
  // Parameters kept for describe().
  double param_h_ = 0.0;
  double param_t_ = 0.0;
  std::string source_;
};

/// Parses `dirac <h>`, `two_point <h> <t>`, `gaussian <mean> <sd>`,
/// `discrete [p1,...] [w1,...]`, `empirical <path>`.
/// Throws std::invalid_argument on unknown kinds or invalid parameters.
FieldDistribution make_distribution(std::string_view spec);

/// E_nu[ln cosh(beta (x + h))].
double expect_lncosh(const FieldDistribution& nu, double beta, double x);

/// E_nu[P(tanh(beta (x + h)))], coefficients in ascending powers of t.
double expect_tanh_poly(const FieldDistribution& nu, std::span<const double> coeffs, double beta,
                        double x);

/// One quenched draw (h_1, ..., h_n).
struct FieldRealization {
  std::vector<double> values;
  std::uint64_t seed = 0;

  std::size_t size() const { return values.size(); }
};

/// Deterministic in (nu, n, seed): value i depends only on (seed, i), so a
/// realization of length n is the prefix of every longer one.
FieldRealization sample_fields(const FieldDistribution& nu, std::size_t n, std::uint64_t seed);

/// Empirical law of a realization; G built from it is G_n^h.
FieldDistribution to_distribution(const FieldRealization& fields);

}  // namespace rfcw
