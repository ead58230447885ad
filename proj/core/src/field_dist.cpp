#include "rfcw/field_dist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rfcw/log_math.hpp"
#include "rfcw/quadrature.hpp"
#include "rfcw/rng.hpp"

namespace rfcw {
namespace {

constexpr double kWeightSumTol = 1e-12;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text, std::string_view what) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) throw std::invalid_argument(std::string(what) + " must be finite");
  return value;
}

std::vector<double> parse_list(std::string_view body) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    const std::size_t comma = body.find(',', start);
    const std::string_view item = body.substr(start, comma == std::string_view::npos ? body.npos : comma - start);
    if (item.find_first_not_of(" \t") != std::string_view::npos) out.push_back(parse_double(item, "list entry"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Splits "[a,b] [c,d]" into the two bracket bodies.
std::pair<std::string_view, std::string_view> split_brackets(std::string_view rest) {
  std::string_view bodies[2];
  std::size_t pos = 0;
  for (auto& body : bodies) {
    const std::size_t open = rest.find('[', pos);
    const std::size_t close = open == rest.npos ? rest.npos : rest.find(']', open);
    if (open == rest.npos || close == rest.npos) {
      throw std::invalid_argument("discrete spec needs two bracketed lists: discrete [p1,...] [w1,...]");
    }
    if (rest.substr(pos, open - pos).find_first_not_of(" \t") != rest.npos) {
      throw std::invalid_argument("unexpected text in discrete spec");
    }
    body = rest.substr(open + 1, close - open - 1);
    pos = close + 1;
  }
  if (rest.substr(pos).find_first_not_of(" \t\r\n") != rest.npos) {
    throw std::invalid_argument("trailing text after discrete spec");
  }
  return {bodies[0], bodies[1]};
}

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t j = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > j) words.push_back(text.substr(j, i - j));
  }
  return words;
}

}  // namespace

std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::dirac: return "dirac";
    case FieldKind::two_point: return "two_point";
    case FieldKind::gaussian: return "gaussian";
    case FieldKind::discrete: return "discrete";
    case FieldKind::empirical: return "empirical";
  }
  return "unknown";
}

void FieldDistribution::finalize_atoms() {
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.point < b.point; });
  std::vector<Atom> merged;
  for (const Atom& a : atoms_) {
    if (a.weight == 0.0) continue;
    if (!merged.empty() && merged.back().point == a.point) {
      merged.back().weight += a.weight;
    } else {
      merged.push_back(a);
    }
  }
  atoms_ = std::move(merged);
}

FieldDistribution FieldDistribution::dirac(double h) {
  if (!std::isfinite(h)) throw std::invalid_argument("dirac: field must be finite");
  FieldDistribution d;
  d.kind_ = FieldKind::dirac;
  d.param_h_ = h;
  d.atoms_ = {{h, 1.0}};
  return d;
}

FieldDistribution FieldDistribution::two_point(double h, double t) {
  if (!std::isfinite(h) || h < 0.0) throw std::invalid_argument("two_point: h must be finite and >= 0");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("two_point: t must lie in [0, 1]");
  FieldDistribution d;
  d.kind_ = FieldKind::two_point;
  d.param_h_ = h;
  d.param_t_ = t;
  d.atoms_ = {{h, t}, {-h, 1.0 - t}};
  d.finalize_atoms();
  return d;
}

FieldDistribution FieldDistribution::gaussian(double mean, double sd) {
  if (!std::isfinite(mean)) throw std::invalid_argument("gaussian: mean must be finite");
  if (!(sd > 0.0) || !std::isfinite(sd)) throw std::invalid_argument("gaussian: sd must be > 0");
  FieldDistribution d;
  d.kind_ = FieldKind::gaussian;
  d.mean_ = mean;
  d.sd_ = sd;
  return d;
}

FieldDistribution FieldDistribution::discrete(std::vector<double> points, std::vector<double> weights) {
  if (points.empty()) throw std::invalid_argument("discrete: no points");
  if (points.size() != weights.size()) throw std::invalid_argument("discrete: points and weights differ in length");
  double total = 0.0;
  FieldDistribution d;
  d.kind_ = FieldKind::discrete;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) throw std::invalid_argument("discrete: non-finite point");
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("discrete: negative weight");
    total += weights[i];
    d.atoms_.push_back({points[i], weights[i]});
  }
  if (std::abs(total - 1.0) > kWeightSumTol) {
    throw std::invalid_argument("discrete: weights sum to " + format_double(total) + ", not 1");
  }
  d.finalize_atoms();
  return d;
}

FieldDistribution FieldDistribution::empirical(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical: no samples");
  FieldDistribution d;
  d.kind_ = FieldKind::empirical;
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double inv = 1.0 / static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    if (!std::isfinite(sorted[i])) throw std::invalid_argument("empirical: non-finite sample");
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    d.atoms_.push_back({sorted[i], static_cast<double>(j - i) * inv});
    i = j;
  }
  return d;
}

FieldDistribution FieldDistribution::empirical_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("empirical: cannot open '" + path + "'");
  std::vector<double> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    samples.push_back(parse_double(line, "empirical sample"));
  }
  FieldDistribution d = empirical(samples);
  d.source_ = path;
  return d;
}

double FieldDistribution::mean() const {
  if (kind_ == FieldKind::gaussian) return mean_;
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight * a.point;
  return s;
}

double FieldDistribution::second_moment() const {
  if (kind_ == FieldKind::gaussian) return mean_ * mean_ + sd_ * sd_;
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight * a.point * a.point;
  return s;
}

bool FieldDistribution::is_symmetric() const {
  if (kind_ == FieldKind::gaussian) return mean_ == 0.0;
  const std::size_t k = atoms_.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Atom& a = atoms_[i];
    const Atom& b = atoms_[k - 1 - i];
    if (a.point != -b.point) return false;
    if (std::abs(a.weight - b.weight) > 1e-14 * std::max(a.weight, b.weight)) return false;
  }
  return true;
}

FieldDistribution FieldDistribution::mirrored() const {
  FieldDistribution d = *this;
  d.mean_ = -mean_;
  if (kind_ == FieldKind::two_point) d.param_t_ = 1.0 - param_t_;
  if (kind_ == FieldKind::dirac) d.param_h_ = -param_h_;
  if (kind_ == FieldKind::empirical) d.source_.clear();
  for (Atom& a : d.atoms_) a.point = -a.point;
  std::reverse(d.atoms_.begin(), d.atoms_.end());
  return d;
}

std::string FieldDistribution::describe() const {
  switch (kind_) {
    case FieldKind::dirac: return "dirac " + format_double(param_h_);
    case FieldKind::two_point: return "two_point " + format_double(param_h_) + " " + format_double(param_t_);
    case FieldKind::gaussian: return "gaussian " + format_double(mean_) + " " + format_double(sd_);
    case FieldKind::empirical:
      if (!source_.empty()) return "empirical " + source_;
      [[fallthrough]];
    case FieldKind::discrete: {
      std::string points = "[";
      std::string weights = "[";
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i > 0) {
          points += ",";
          weights += ",";
        }
        points += format_double(atoms_[i].point);
        weights += format_double(atoms_[i].weight);
      }
      return "discrete " + points + "] " + weights + "]";
    }
  }
  return {};
}

double FieldDistribution::expect(const std::function<double(double)>& f) const {
  if (kind_ == FieldKind::gaussian) return gaussian_expectation(f, mean_, sd_).value;
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight * f(a.point);
  return s;
}

FieldDistribution make_distribution(std::string_view spec) {
  const auto words = split_words(spec);
  if (words.empty()) throw std::invalid_argument("empty distribution spec");
  const std::string_view kind = words[0];
  auto expect_args = [&](std::size_t count) {
    if (words.size() != count + 1) {
      throw std::invalid_argument(std::string(kind) + " expects " + std::to_string(count) + " argument(s)");
    }
  };
  if (kind == "dirac") {
    expect_args(1);
    return FieldDistribution::dirac(parse_double(words[1], "dirac field"));
  }
  if (kind == "two_point") {
    expect_args(2);
    return FieldDistribution::two_point(parse_double(words[1], "two_point h"), parse_double(words[2], "two_point t"));
  }
  if (kind == "gaussian") {
    expect_args(2);
    return FieldDistribution::gaussian(parse_double(words[1], "gaussian mean"), parse_double(words[2], "gaussian sd"));
  }
  if (kind == "discrete") {
    const std::size_t at = spec.find("discrete") + std::string_view("discrete").size();
    const auto [points, weights] = split_brackets(spec.substr(at));
    return FieldDistribution::discrete(parse_list(points), parse_list(weights));
  }
  if (kind == "empirical") {
    expect_args(1);
    return FieldDistribution::empirical_from_file(std::string(words[1]));
  }
  throw std::invalid_argument("unknown distribution kind '" + std::string(kind) + "'");
}

double expect_lncosh(const FieldDistribution& nu, double beta, double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("expect_lncosh: non-finite x");
  return nu.expect([&](double h) { return log_cosh(beta * (x + h)); });
}

double expect_tanh_poly(const FieldDistribution& nu, std::span<const double> coeffs, double beta,
                        double x) {
  if (coeffs.empty()) throw std::invalid_argument("expect_tanh_poly: empty coefficient list");
  if (!std::isfinite(x)) throw std::invalid_argument("expect_tanh_poly: non-finite x");
  return nu.expect([&](double h) {
    const double t = std::tanh(beta * (x + h));
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
    return acc;
  });
}

FieldRealization sample_fields(const FieldDistribution& nu, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_fields: n must be >= 1");
  const CounterRng rng(derive_key(seed, 0));
  FieldRealization out;
  out.seed = seed;
  out.values.resize(n);

  if (nu.kind() == FieldKind::gaussian) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u1 = 1.0 - rng.uniform_at(2 * i);
      const double u2 = rng.uniform_at(2 * i + 1);
      const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      out.values[i] = nu.gaussian_mean() + nu.gaussian_sd() * z;
    }
    return out;
  }

  const auto atoms = nu.atoms();
  std::vector<double> cumulative(atoms.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    acc += atoms[k].weight;
    cumulative[k] = acc;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform_at(2 * i) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    out.values[i] = atoms[static_cast<std::size_t>(it - cumulative.begin())].point;
  }
  return out;
}

FieldDistribution to_distribution(const FieldRealization& fields) {
  return FieldDistribution::empirical(fields.values);
}

}  // namespace rfcw
