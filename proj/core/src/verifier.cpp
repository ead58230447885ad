#include "rfcw/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rfcw/exact_engine.hpp"
#include "rfcw/log_math.hpp"
#include "rfcw/mc_engine.hpp"
#include "rfcw/rate_theory.hpp"

namespace rfcw {
namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': '" + text + "' is not a number");
  }
  if (used != text.size()) throw std::invalid_argument("config key '" + key + "': '" + text + "' is not a number");
  return v;
}

unsigned long long parse_unsigned(const std::string& key, const std::string& text) {
  if (text.empty() || text.front() == '-') {
    throw std::invalid_argument("config key '" + key + "': '" + text + "' is not a nonnegative integer");
  }
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) {
    // Accept integral values written in floating-point form, e.g. 1e5.
    const double d = parse_double(key, text);
    if (!(d >= 0.0) || d != std::floor(d) || d > 1e18) {
      throw std::invalid_argument("config key '" + key + "': '" + text + "' is not a nonnegative integer");
    }
    return static_cast<unsigned long long>(d);
  }
  return v;
}

Json json_array(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(json_number(v));
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

// Runs body(i) for i in [0, count) on up to max_threads() workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, max_threads());
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void require_ascending(const std::vector<std::size_t>& n_list) {
  if (n_list.empty()) throw std::invalid_argument("n_list must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0) throw std::invalid_argument("n_list entries must be >= 1");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw std::invalid_argument("n_list must be strictly increasing");
  }
}

// The minimum nearest to the hint, or the largest global minimum.
MinimumInfo select_minimum(const GFunction& g, std::optional<double> hint) {
  const auto minima = analyze_minima(g);
  if (minima.empty()) throw std::runtime_error("G has no local minimum");
  if (hint) {
    return *std::min_element(minima.begin(), minima.end(), [&](const MinimumInfo& a, const MinimumInfo& b) {
      return std::abs(a.location - *hint) < std::abs(b.location - *hint);
    });
  }
  for (auto it = minima.rbegin(); it != minima.rend(); ++it) {
    if (it->is_global) return *it;
  }
  return minima.back();
}

Json minimum_json(const MinimumInfo& info) {
  return {{"location", json_number(info.location)},
          {"type", info.type},
          {"strength", json_number(info.strength)},
          {"height", json_number(info.height)},
          {"broadness", json_number(info.broadness)},
          {"cond_radius", json_number(info.cond_radius)},
          {"is_global", info.is_global},
          {"mdp_condition_ok", info.mdp_condition_ok}};
}

Json sizes_json(const std::vector<std::size_t>& v) { return Json(v); }

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Number of i with series[i+1] > series[i].
int increases(const std::vector<double>& series) {
  int count = 0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (!(series[i] <= series[i - 1])) ++count;
  }
  return count;
}

std::string kind_name(RateKind kind) {
  switch (kind) {
    case RateKind::mdp_conditioned: return "mdp_conditioned";
    case RateKind::mdp_unconditioned: return "mdp_unconditioned";
    case RateKind::ldp: return "ldp";
  }
  return "unknown";
}

// Smallest double above x, so [lo, above(x)) contains x.
double above(double x) { return std::nextafter(x, kInf); }

double relative_error(double value, double reference) {
  if (reference == 0.0) return std::abs(value);
  return std::abs(value - reference) / std::abs(reference);
}

}  // namespace

Json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json VerificationReport::to_json(bool include_runtime) const {
  Json out = {{"experiment", experiment}, {"inputs", inputs},         {"theory", theory},
              {"empirical", empirical},   {"metrics", metrics},       {"tolerances", tolerances},
              {"passed", passed}};
  if (include_runtime) out["runtime_seconds"] = runtime_seconds;
  return out;
}

// -- ExperimentConfig -------------------------------------------------------

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    if (cfg.has(key)) throw std::invalid_argument("config key '" + key + "' given twice");
    cfg.set(std::move(key), std::move(value));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string ExperimentConfig::get_string(const std::string& key, std::string fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

std::optional<double> ExperimentConfig::get_optional_double(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return parse_double(key, it->second);
}

long ExperimentConfig::get_int(const std::string& key, long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const double d = parse_double(key, it->second);
  if (d != std::floor(d) || std::abs(d) > 1e15) {
    throw std::invalid_argument("config key '" + key + "': '" + it->second + "' is not an integer");
  }
  return static_cast<long>(d);
}

std::uint64_t ExperimentConfig::get_seed(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_unsigned(key, it->second);
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& key, std::vector<double> fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split(it->second, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::vector<std::size_t> ExperimentConfig::get_sizes(const std::string& key,
                                                     std::vector<std::size_t> fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<std::size_t> out;
  for (const auto& item : split(it->second, ',')) out.push_back(parse_unsigned(key, item));
  return out;
}

void ExperimentConfig::require_known(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
}

// -- hs_consistency -----------------------------------------------------------

HsConsistencyParams HsConsistencyParams::from_config(const ExperimentConfig& cfg) {
  cfg.require_known({"n", "beta", "nu", "seed", "alpha", "m", "s_lo", "s_hi", "points", "tolerance"});
  HsConsistencyParams p;
  p.n = static_cast<std::size_t>(cfg.get_seed("n", p.n));
  p.beta = cfg.get_double("beta", p.beta);
  p.nu = cfg.get_string("nu", p.nu);
  p.seed = cfg.get_seed("seed", p.seed);
  p.alpha = cfg.get_double("alpha", p.alpha);
  p.m = cfg.get_optional_double("m");
  p.s_lo = cfg.get_double("s_lo", p.s_lo);
  p.s_hi = cfg.get_double("s_hi", p.s_hi);
  p.points = static_cast<std::size_t>(cfg.get_seed("points", p.points));
  p.tolerance = cfg.get_double("tolerance", p.tolerance);
  return p;
}

VerificationReport verify_hs_consistency(const HsConsistencyParams& p) {
  const Stopwatch clock;
  if (p.n == 0 || p.n > 10000) throw std::invalid_argument("hs_consistency: n must lie in [1, 10000]");
  if (p.points < 2 || !(p.s_lo < p.s_hi)) throw std::invalid_argument("hs_consistency: bad grid");
  const auto nu = make_distribution(p.nu);
  const double m = p.m ? *p.m : select_minimum(GFunction(p.beta, nu), std::nullopt).location;

  const auto fields = sample_fields(nu, p.n, p.seed);
  const auto pmf = exact_log_pmf(fields, p.beta);
  const auto grid = linspace(p.s_lo, p.s_hi, p.points);
  const auto hs = hs_log_density(fields, p.beta, m, p.alpha, grid);
  const auto conv = gaussian_convolve(pmf, m, p.alpha, grid);

  double max_rel = 0.0;
  double max_log_diff = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = conv[i] - hs.log_density[i];
    max_log_diff = std::max(max_log_diff, std::abs(d));
    max_rel = std::max(max_rel, std::abs(std::expm1(d)));
  }

  VerificationReport r;
  r.experiment = "hs_consistency";
  r.inputs = {{"n", p.n},           {"beta", p.beta},   {"nu", p.nu},         {"seed", p.seed},
              {"alpha", p.alpha},   {"m", m},           {"s_lo", p.s_lo},     {"s_hi", p.s_hi},
              {"points", p.points}};
  r.theory = {{"s", json_array(grid)}, {"log_density", json_array(hs.log_density)},
              {"log_normalizer", hs.log_normalizer}, {"gauss_variance", hs.gauss_variance}};
  r.empirical = {{"log_density", json_array(conv)}};
  r.metrics = {{"max_relative_error", max_rel}, {"max_abs_log_difference", max_log_diff}};
  r.tolerances = {{"max_relative_error", p.tolerance}};
  r.passed = max_rel < p.tolerance;
  r.runtime_seconds = clock.seconds();
  return r;
}

// -- uniform_convergence --------------------------------------------------------

UniformConvergenceParams UniformConvergenceParams::from_config(const ExperimentConfig& cfg) {
  cfg.require_known({"nu", "beta", "m_hint", "alpha", "n_list", "seed", "s_lo", "s_hi", "s_points", "delta",
                     "tolerance"});
  UniformConvergenceParams p;
  p.nu = cfg.get_string("nu", p.nu);
  p.beta = cfg.get_double("beta", p.beta);
  p.m_hint = cfg.get_optional_double("m_hint");
  p.alpha = cfg.get_double("alpha", p.alpha);
  p.n_list = cfg.get_sizes("n_list", p.n_list);
  p.seed = cfg.get_seed("seed", p.seed);
  p.s_lo = cfg.get_double("s_lo", p.s_lo);
  p.s_hi = cfg.get_double("s_hi", p.s_hi);
  p.s_points = static_cast<std::size_t>(cfg.get_seed("s_points", p.s_points));
  p.delta = cfg.get_double("delta", p.delta);
  p.tolerance = cfg.get_double("tolerance", p.tolerance);
  return p;
}

VerificationReport verify_uniform_convergence(const UniformConvergenceParams& p) {
  const Stopwatch clock;
  require_ascending(p.n_list);
  if (p.s_points < 2 || !(p.s_lo < p.s_hi)) throw std::invalid_argument("uniform_convergence: bad s range");
  const auto nu = make_distribution(p.nu);
  const GFunction g(p.beta, nu);
  const MinimumInfo info = select_minimum(g, p.m_hint);
  const int k = info.type;
  const double lambda = info.strength;
  const double m = info.location;
  (void)scaling(k, p.alpha, 1.0);

  double delta = p.delta;
  double next_derivative_bound = 0.0;
  for (double x : linspace(m - 1.0, m + 1.0, 2001)) {
    next_derivative_bound = std::max(next_derivative_bound, std::abs(g.derivative(2 * k + 1, x)));
  }
  if (!(delta > 0.0)) {
    delta = next_derivative_bound > 0.0 ? 0.5 * std::min(1.0, lambda / (4.0 * next_derivative_bound)) : 0.5;
  }

  const auto s_grid = linspace(p.s_lo, p.s_hi, p.s_points);
  const double norm = factorial(2 * k);
  std::vector<double> limit(s_grid.size());
  for (std::size_t i = 0; i < s_grid.size(); ++i) limit[i] = lambda * std::pow(s_grid[i], 2 * k) / norm;

  struct PerN {
    std::vector<double> rescaled;
    double sup_error = 0.0;
    std::size_t bound_points = 0;
    std::size_t bound_violations = 0;
    double worst_bound_margin = kInf;
  };
  std::vector<PerN> results(p.n_list.size());
  parallel_for(p.n_list.size(), [&](std::size_t j) {
    const auto n = static_cast<double>(p.n_list[j]);
    const auto gn = GFunction::from_realization(p.beta, sample_fields(nu, p.n_list[j], p.seed));
    const double base = gn.value(m);
    const double shrink = std::pow(n, p.alpha - 1.0);
    const double blow = std::pow(n, 2.0 * k * (1.0 - p.alpha));
    const auto rescaled = [&](double s) { return blow * (gn.value(m + s * shrink) - base); };

    PerN out;
    out.rescaled.resize(s_grid.size());
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
      out.rescaled[i] = rescaled(s_grid[i]);
      out.sup_error = std::max(out.sup_error, std::abs(out.rescaled[i] - limit[i]));
    }
    const double reach = delta / shrink;
    for (double s : linspace(-reach, reach, 2001)) {
      double bound = lambda * std::pow(s, 2 * k) / (2.0 * norm);
      for (int i = 1; i < 2 * k; ++i) bound -= std::pow(std::abs(s), i);
      const double margin = rescaled(s) - bound;
      ++out.bound_points;
      if (margin < 0.0) ++out.bound_violations;
      out.worst_bound_margin = std::min(out.worst_bound_margin, margin);
    }
    results[j] = std::move(out);
  });

  std::vector<double> sup_errors;
  std::size_t violations = 0;
  Json curves = Json::array();
  for (std::size_t j = 0; j < results.size(); ++j) {
    sup_errors.push_back(results[j].sup_error);
    violations += results[j].bound_violations;
    curves.push_back({{"n", p.n_list[j]},
                      {"rescaled", json_array(results[j].rescaled)},
                      {"sup_error", results[j].sup_error},
                      {"lower_bound_points", results[j].bound_points},
                      {"lower_bound_violations", results[j].bound_violations},
                      {"lower_bound_worst_margin", json_number(results[j].worst_bound_margin)}});
  }
  bool decreasing = true;
  for (std::size_t j = 1; j < sup_errors.size(); ++j) decreasing = decreasing && sup_errors[j] < sup_errors[j - 1];

  VerificationReport r;
  r.experiment = "uniform_convergence";
  r.inputs = {{"nu", p.nu},         {"beta", p.beta},     {"m", m},
              {"alpha", p.alpha},   {"n_list", sizes_json(p.n_list)},
              {"seed", p.seed},     {"s_lo", p.s_lo},     {"s_hi", p.s_hi},
              {"s_points", p.s_points}, {"delta", delta}};
  r.theory = {{"minimum", minimum_json(info)},
              {"s", json_array(s_grid)},
              {"limit", json_array(limit)},
              {"next_derivative_bound", next_derivative_bound}};
  r.empirical = {{"curves", curves}};
  r.metrics = {{"sup_error", json_array(sup_errors)},
               {"sup_error_at_largest_n", sup_errors.back()},
               {"strictly_decreasing", decreasing},
               {"lower_bound_violations", violations}};
  r.tolerances = {{"sup_error_at_largest_n", p.tolerance}};
  r.passed = sup_errors.back() < p.tolerance && decreasing && violations == 0;
  r.runtime_seconds = clock.seconds();
  return r;
}

// -- transfer_identity ------------------------------------------------------

TransferIdentityParams TransferIdentityParams::from_config(const ExperimentConfig& cfg) {
  cfg.require_known({"lambdas", "betas", "y_lo", "y_hi", "y_points", "tolerance"});
  TransferIdentityParams p;
  if (cfg.has("lambdas") || cfg.has("betas")) {
    const auto lambdas = cfg.get_doubles("lambdas", {});
    const auto betas = cfg.get_doubles("betas", {});
    if (lambdas.size() != betas.size() || lambdas.empty()) {
      throw std::invalid_argument("lambdas and betas must be nonempty lists of equal length");
    }
    p.pairs.clear();
    for (std::size_t i = 0; i < lambdas.size(); ++i) p.pairs.emplace_back(lambdas[i], betas[i]);
  }
  p.y_lo = cfg.get_double("y_lo", p.y_lo);
  p.y_hi = cfg.get_double("y_hi", p.y_hi);
  p.y_points = static_cast<std::size_t>(cfg.get_seed("y_points", p.y_points));
  p.tolerance = cfg.get_double("tolerance", p.tolerance);
  return p;
}

VerificationReport verify_transfer_identity(const TransferIdentityParams& p) {
  const Stopwatch clock;
  const auto ys = linspace(p.y_lo, p.y_hi, p.y_points);
  Json cases = Json::array();
  double worst = 0.0;
  for (const auto& [lambda, beta] : p.pairs) {
    const double sigma2 = 1.0 / lambda - 1.0 / beta;
    std::vector<double> numeric;
    std::vector<double> closed;
    double case_worst = 0.0;
    for (double y : ys) {
      numeric.push_back(gaussian_transfer_rate(lambda, beta, y));
      closed.push_back(y * y / (2.0 * sigma2));
      case_worst = std::max(case_worst, std::abs(numeric.back() - closed.back()));
    }
    worst = std::max(worst, case_worst);
    cases.push_back({{"lambda", lambda},
                     {"beta", beta},
                     {"sigma2", sigma2},
                     {"numeric", json_array(numeric)},
                     {"closed_form", json_array(closed)},
                     {"max_abs_error", case_worst}});
  }
  VerificationReport r;
  r.experiment = "transfer_identity";
  Json pairs = Json::array();
  for (const auto& [lambda, beta] : p.pairs) pairs.push_back({lambda, beta});
  r.inputs = {{"pairs", pairs}, {"y_lo", p.y_lo}, {"y_hi", p.y_hi}, {"y_points", p.y_points}};
  r.theory = {{"y", json_array(ys)}};
  r.empirical = {{"cases", cases}};
  r.metrics = {{"max_abs_error", worst}};
  r.tolerances = {{"max_abs_error", p.tolerance}};
  r.passed = worst <= p.tolerance;
  r.runtime_seconds = clock.seconds();
  return r;
}

// -- rate -------------------------------------------------------------------

RateParams RateParams::from_config(const ExperimentConfig& cfg) {
  cfg.require_known({"kind", "nu", "beta", "m_hint", "alpha", "a", "n_list", "x_grid", "engine", "seed",
                     "tolerance", "sweeps", "burn_in", "thin", "chains"});
  RateParams p;
  const auto kind = cfg.get_string("kind", kind_name(p.kind));
  if (kind == "mdp_conditioned") p.kind = RateKind::mdp_conditioned;
  else if (kind == "mdp_unconditioned") p.kind = RateKind::mdp_unconditioned;
  else if (kind == "ldp") p.kind = RateKind::ldp;
  else throw std::invalid_argument("unknown rate kind '" + kind + "'");
  const auto engine = cfg.get_string("engine", "exact");
  if (engine == "exact") p.engine = Engine::exact;
  else if (engine == "mc") p.engine = Engine::mc;
  else throw std::invalid_argument("unknown engine '" + engine + "'");
  p.nu = cfg.get_string("nu", p.nu);
  p.beta = cfg.get_double("beta", p.beta);
  p.m_hint = cfg.get_optional_double("m_hint");
  p.alpha = cfg.get_double("alpha", p.alpha);
  p.a = cfg.get_double("a", p.a);
  p.n_list = cfg.get_sizes("n_list", p.n_list);
  p.x_grid = cfg.get_doubles("x_grid", p.x_grid);
  p.seed = cfg.get_seed("seed", p.seed);
  p.tolerance = cfg.get_double("tolerance", p.tolerance);
  p.mc_sweeps = static_cast<std::size_t>(cfg.get_seed("sweeps", p.mc_sweeps));
  p.mc_burn_in = static_cast<std::size_t>(cfg.get_seed("burn_in", p.mc_burn_in));
  p.mc_thin = static_cast<std::size_t>(cfg.get_seed("thin", p.mc_thin));
  p.mc_chains = static_cast<std::size_t>(cfg.get_seed("chains", p.mc_chains));
  return p;
}

VerificationReport verify_rate(const RateParams& p) {
  const Stopwatch clock;
  require_ascending(p.n_list);
  if (p.x_grid.empty()) throw std::invalid_argument("rate: x_grid must not be empty");
  const bool ldp = p.kind == RateKind::ldp;
  for (double x : p.x_grid) {
    if (!ldp && !(x > 0.0)) throw std::invalid_argument("rate: x_grid entries must be > 0");
    if (ldp && !(std::abs(x) <= 1.0)) throw std::invalid_argument("rate: ldp x_grid entries must lie in [-1, 1]");
  }
  const auto nu = make_distribution(p.nu);
  const GFunction g(p.beta, nu);
  const auto all = analyze_minima(g);
  const MinimumInfo info = select_minimum(g, p.m_hint);
  const double m = info.location;

  std::optional<Interval> condition;
  if (p.kind == RateKind::mdp_conditioned) {
    if (!(p.a > 0.0 && p.a < info.cond_radius)) {
      throw std::invalid_argument("rate: a must lie in (0, " + std::to_string(info.cond_radius) +
                                  "), the conditioning radius of the minimum");
    }
    condition = Interval{m - p.a, above(m + p.a)};
  }
  if (p.kind == RateKind::mdp_unconditioned) {
    const auto globals = std::count_if(all.begin(), all.end(), [](const MinimumInfo& i) { return i.is_global; });
    if (globals != 1 || !info.is_global) {
      throw std::invalid_argument("rate: mdp_unconditioned needs m to be the unique global minimum of G");
    }
  }

  // Theory per x.
  std::vector<double> theory(p.x_grid.size());
  std::optional<RateSpec> spec;
  if (ldp) {
    const LdpRate rate(g);
    for (std::size_t i = 0; i < p.x_grid.size(); ++i) {
      const double x = p.x_grid[i];
      const auto event = x >= m ? linspace(x, 1.0, 101) : linspace(-1.0, x, 101);
      double best = kInf;
      for (double y : event) best = std::min(best, rate(y));
      theory[i] = best;
    }
  } else {
    spec = RateSpec::from_minimum(info, p.beta);
    (void)scaling(info.type, p.alpha, 1.0);
    for (std::size_t i = 0; i < p.x_grid.size(); ++i) theory[i] = mdp_rate(*spec, p.x_grid[i]);
  }

  struct PerN {
    double speed = 0.0;
    double log_condition = 0.0;
    std::vector<double> log_prob, log_upper, log_lower, rate, rate_upper, rate_lower, error;
    double tv_or_nan = std::nan("");
  };
  std::vector<PerN> results(p.n_list.size());
  parallel_for(p.n_list.size(), [&](std::size_t j) {
    const std::size_t n = p.n_list[j];
    const auto fields = sample_fields(nu, n, p.seed);
    LogPMF pmf;
    if (p.engine == Engine::exact) {
      pmf = exact_log_pmf(fields, p.beta);
    } else {
      ChainConfig cfg;
      cfg.beta = p.beta;
      cfg.fields = fields;
      cfg.sweeps = p.mc_sweeps;
      cfg.burn_in = p.mc_burn_in;
      cfg.thin = p.mc_thin;
      cfg.seed = p.seed;
      const auto samples = run_glauber_chains(cfg, p.mc_chains);
      const auto est = empirical_pmf(samples, n);
      pmf.n = n;
      pmf.beta = p.beta;
      pmf.fields = fields;
      pmf.log_p.resize(n + 1);
      for (std::size_t i = 0; i <= n; ++i) pmf.log_p[i] = est.counts[i] == 0 ? kNegInf : std::log(est.probability[i]);
    }

    PerN out;
    const double nd = static_cast<double>(n);
    out.speed = ldp ? nd : scaling(info.type, p.alpha, nd).speed;
    if (condition) {
      out.log_condition = interval_log_prob(pmf, 0.0, 1.0, *condition);
      if (out.log_condition < -700.0) {
        throw std::domain_error("rate: conditioning event too small at n = " + std::to_string(n) +
                                " (log-probability below -700); raise n or a");
      }
    }
    for (double x : p.x_grid) {
      double upper = 0.0;
      double lower = 0.0;
      double both = 0.0;
      if (ldp) {
        both = x >= m ? interval_log_prob(pmf, 0.0, 1.0, Interval::at_least(x))
                      : interval_log_prob(pmf, 0.0, 1.0, Interval::below(x));
        upper = lower = both;
      } else {
        upper = interval_log_prob(pmf, m, p.alpha, Interval::at_least(x), condition);
        lower = interval_log_prob(pmf, m, p.alpha, Interval::below(above(-x)), condition);
        both = log_add_exp(upper, lower);
      }
      out.log_prob.push_back(both);
      out.log_upper.push_back(upper);
      out.log_lower.push_back(lower);
      out.rate.push_back(-both / out.speed);
      out.rate_upper.push_back(-upper / out.speed);
      out.rate_lower.push_back(-lower / out.speed);
    }
    for (std::size_t i = 0; i < p.x_grid.size(); ++i) out.error.push_back(relative_error(out.rate[i], theory[i]));
    results[j] = std::move(out);
  });

  Json curves = Json::array();
  for (std::size_t j = 0; j < results.size(); ++j) {
    const auto& res = results[j];
    Json curve = {{"n", p.n_list[j]},
                  {"speed", res.speed},
                  {"log_prob", json_array(res.log_prob)},
                  {"rate", json_array(res.rate)},
                  {"relative_error", json_array(res.error)}};
    if (!ldp) {
      curve["rate_upper_only"] = json_array(res.rate_upper);
      curve["rate_lower_only"] = json_array(res.rate_lower);
    }
    if (condition) curve["log_condition_prob"] = res.log_condition;
    curves.push_back(std::move(curve));
  }

  bool passed = true;
  std::vector<int> trend_violations;
  std::vector<double> final_errors = results.back().error;
  for (std::size_t i = 0; i < p.x_grid.size(); ++i) {
    std::vector<double> series;
    for (const auto& res : results) series.push_back(res.error[i]);
    trend_violations.push_back(increases(series));
    passed = passed && final_errors[i] <= p.tolerance && trend_violations.back() <= 1;
  }

  VerificationReport r;
  r.experiment = "rate";
  r.inputs = {{"kind", kind_name(p.kind)},
              {"nu", p.nu},
              {"beta", p.beta},
              {"m", m},
              {"alpha", p.alpha},
              {"n_list", sizes_json(p.n_list)},
              {"x_grid", json_array(p.x_grid)},
              {"engine", p.engine == Engine::exact ? "exact" : "mc"},
              {"seed", p.seed}};
  if (condition) {
    r.inputs["a"] = p.a;
    r.inputs["condition"] = {{"lo", condition->lo}, {"hi", condition->hi}};
  }
  if (p.engine == Engine::mc) {
    r.inputs["sweeps"] = p.mc_sweeps;
    r.inputs["burn_in"] = p.mc_burn_in;
    r.inputs["thin"] = p.mc_thin;
    r.inputs["chains"] = p.mc_chains;
  }
  r.inputs["event"] = ldp ? "S_n/n >= x (S_n/n < x below the minimiser)"
                          : "|S_n - n m| / n^alpha >= x (upper event and its mirror)";
  r.theory = {{"minimum", minimum_json(info)}, {"x", json_array(p.x_grid)}, {"rate", json_array(theory)}};
  if (spec && spec->k == 1) r.theory["sigma2"] = spec->sigma2();
  r.empirical = {{"curves", curves}};
  r.metrics = {{"relative_error_at_largest_n", json_array(final_errors)},
               {"trend_violations", trend_violations}};
  r.tolerances = {{"relative_error", p.tolerance}, {"trend_violations", 1}};
  r.passed = passed;
  r.runtime_seconds = clock.seconds();
  return r;
}

// -- counterexample -------------------------------------------------------------

CounterexampleParams CounterexampleParams::from_config(const ExperimentConfig& cfg) {
  cfg.require_known({"beta", "alpha", "n_list", "a", "ratio_threshold", "tolerance"});
  CounterexampleParams p;
  p.beta = cfg.get_double("beta", p.beta);
  p.alpha = cfg.get_double("alpha", p.alpha);
  p.n_list = cfg.get_sizes("n_list", p.n_list);
  p.a = cfg.get_double("a", p.a);
  p.ratio_threshold = cfg.get_double("ratio_threshold", p.ratio_threshold);
  p.tolerance = cfg.get_double("tolerance", p.tolerance);
  return p;
}

VerificationReport verify_counterexample(const CounterexampleParams& p) {
  const Stopwatch clock;
  if (!(p.beta > 1.0)) throw std::invalid_argument("counterexample: beta must be > 1");
  require_ascending(p.n_list);
  if (!(p.a > 0.0)) throw std::invalid_argument("counterexample: a must be > 0");
  const auto nu = FieldDistribution::dirac(0.0);
  const GFunction g(p.beta, nu);
  const MinimumInfo info = select_minimum(g, std::nullopt);
  const double m = info.location;
  if (!(m > 0.0)) throw std::runtime_error("counterexample: no positive minimum found");
  (void)scaling(1, p.alpha, 1.0);
  const double sigma2 = 1.0 / info.strength - 1.0 / p.beta;
  const double sigma2_fixed_point = (1.0 - m * m) / (1.0 - p.beta * (1.0 - m * m));
  const double target = 1.0 / (2.0 * sigma2);
  const Interval condition{m - p.a, above(m + p.a)};

  struct PerN {
    double speed, log_uncond, log_cond, log_condition, r_uncond, r_cond, symmetry_gap;
  };
  std::vector<PerN> results(p.n_list.size());
  parallel_for(p.n_list.size(), [&](std::size_t j) {
    const std::size_t n = p.n_list[j];
    const auto pmf = exact_log_pmf(sample_fields(nu, n, 0), p.beta);
    const double nd = static_cast<double>(n);
    PerN out{};
    out.speed = std::pow(nd, 2.0 * p.alpha - 1.0);
    const Interval beyond_up = Interval::at_least(above(1.0));
    const Interval beyond_down = Interval::below(-1.0);
    out.log_uncond = log_add_exp(interval_log_prob(pmf, m, p.alpha, beyond_up),
                                 interval_log_prob(pmf, m, p.alpha, beyond_down));
    out.log_condition = interval_log_prob(pmf, 0.0, 1.0, condition);
    if (out.log_condition < -700.0) throw std::domain_error("counterexample: conditioning event too small");
    out.log_cond = log_add_exp(interval_log_prob(pmf, m, p.alpha, beyond_up, condition),
                               interval_log_prob(pmf, m, p.alpha, beyond_down, condition));
    out.r_uncond = -out.log_uncond / out.speed;
    out.r_cond = -out.log_cond / out.speed;
    const double half = 0.5 / nd;
    out.symmetry_gap = std::abs(interval_log_prob(pmf, 0.0, 1.0, Interval::at_least(half)) -
                                interval_log_prob(pmf, 0.0, 1.0, Interval::below(-half)));
    results[j] = out;
  });

  Json curves = Json::array();
  for (std::size_t j = 0; j < results.size(); ++j) {
    const auto& res = results[j];
    curves.push_back({{"n", p.n_list[j]},
                      {"speed", res.speed},
                      {"log_prob_unconditioned", json_number(res.log_uncond)},
                      {"log_prob_conditioned", json_number(res.log_cond)},
                      {"log_condition_prob", res.log_condition},
                      {"rate_unconditioned", json_number(res.r_uncond)},
                      {"rate_conditioned", json_number(res.r_cond)},
                      {"symmetry_gap", res.symmetry_gap}});
  }
  const auto& last = results.back();
  const double ratio = last.r_uncond / target;
  const double cond_error = relative_error(last.r_cond, target);
  double symmetry = 0.0;
  for (const auto& res : results) symmetry = std::max(symmetry, res.symmetry_gap);

  VerificationReport r;
  r.experiment = "counterexample";
  r.inputs = {{"nu", "dirac 0"}, {"beta", p.beta}, {"alpha", p.alpha}, {"n_list", sizes_json(p.n_list)},
              {"a", p.a},        {"m", m},         {"event", "|S_n - n m| / n^alpha > 1"}};
  r.theory = {{"minimum", minimum_json(info)},
              {"sigma2", sigma2},
              {"sigma2_fixed_point", sigma2_fixed_point},
              {"rate", target}};
  r.empirical = {{"curves", curves}};
  r.metrics = {{"unconditioned_ratio", json_number(ratio)},
               {"conditioned_relative_error", json_number(cond_error)},
               {"max_symmetry_gap", symmetry}};
  r.tolerances = {{"unconditioned_ratio", p.ratio_threshold},
                  {"conditioned_relative_error", p.tolerance},
                  {"max_symmetry_gap", 1e-12}};
  r.passed = ratio < p.ratio_threshold && cond_error <= p.tolerance && symmetry <= 1e-12;
  r.runtime_seconds = clock.seconds();
  return r;
}

// -- dichotomous model ---------------------------------------------------------

namespace dichotomous {
namespace {

GFunction model(double beta, double h) { return GFunction(beta, FieldDistribution::two_point(h, 0.5)); }

// Bisection for a sign change of f on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi, const char* what) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) throw std::runtime_error(std::string(what) + ": bisection bracket failure");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Root of 2 y tanh(y) = 1: beyond beta = y/h the map beta sech^2(beta h) decreases.
double turning_point() {
  static const double y = bisect([](double v) { return 2.0 * v * std::tanh(v) - 1.0; }, 0.1, 2.0, "turning point");
  return y;
}

double second_order_residual(double beta, double h) {
  const double t = std::tanh(beta * h);
  return beta * (1.0 - t * t) - 1.0;
}

// G(m) - G(0) for the deepest positive minimum, +inf when there is none.
double depth_gap(double beta, double h) {
  const GFunction g = model(beta, h);
  double best = kInf;
  for (double m : find_minima(g)) {
    if (m > 1e-6) best = std::min(best, g.value(m) - g.value(0.0));
  }
  return best;
}

}  // namespace

double tricritical_field_formula() { return (2.0 / 3.0) * std::acosh(std::sqrt(1.5)); }

double second_order_beta(double h) {
  if (!(h >= 0.0)) throw std::invalid_argument("second_order_beta: h must be >= 0");
  if (h == 0.0) return 1.0;
  const double hi = std::max(1.0, turning_point() / h);
  if (second_order_residual(hi, h) < 0.0) {
    throw std::domain_error("second_order_beta: no second-order point at h = " + std::to_string(h));
  }
  return bisect([h](double b) { return second_order_residual(b, h); }, 1.0, hi, "second_order_beta");
}

double tricritical_field() {
  const auto fourth = [](double h) { return model(second_order_beta(h), h).derivative(4, 0.0); };
  return bisect(fourth, 0.3, 0.44, "tricritical_field");
}

double first_order_beta(double h) {
  if (!(h > 0.0 && h < 0.5)) throw std::invalid_argument("first_order_beta: h must lie in (0, 1/2)");
  double lo = 1.0;
  if (!(depth_gap(lo, h) > 0.0)) throw std::runtime_error("first_order_beta: bisection bracket failure");
  double hi = 1.5;
  for (int i = 0; depth_gap(hi, h) > 0.0; ++i) {
    if (i == 20) throw std::runtime_error("first_order_beta: bisection bracket failure");
    lo = hi;
    hi *= 2.0;
  }
  // depth_gap jumps from +inf to finite values when the nonzero minima appear;
  // bisect on the sign only.
  const auto sign = [h](double b) { return depth_gap(b, h) > 0.0 ? 1.0 : -1.0; };
  return bisect(sign, lo, hi, "first_order_beta");
}

double critical_beta(double h) {
  if (!(h >= 0.0 && h < 0.5)) throw std::invalid_argument("critical_beta: h must lie in [0, 1/2)");
  static const double hc = tricritical_field();
  return h <= hc ? second_order_beta(h) : first_order_beta(h);
}

ClosedForms closed_forms_at_zero(double beta, double h) {
  const double t = std::tanh(beta * h);
  const double t2 = t * t;
  ClosedForms c;
  c.lambda1 = beta - beta * beta * (1.0 - t2);
  c.lambda3 = 2.0 * std::pow(beta, 4) * (1.0 - 4.0 * t2 + 3.0 * t2 * t2);
  c.sigma1_sq = (1.0 - t2) / (1.0 - beta * (1.0 - t2));
  const double b6 = 8.0 * std::pow(beta, 6);
  c.lambda4_literal = b6 * (-2.0 + 17.0 * t2 - 30.0 * t2 * t2 + 15.0 * std::pow(t, 8));
  c.lambda4_corrected = b6 * (-2.0 + 17.0 * t2 - 30.0 * t2 * t2 + 15.0 * std::pow(t, 6));
  return c;
}

double lambda2(double beta, double /*h*/, double m) {
  const double coth = 1.0 / std::tanh(2.0 * beta * m);
  return beta - 2.0 * m * beta * beta * (coth - m);
}

double sigma2_sq(double beta, double /*h*/, double m) {
  const double c = 1.0 / std::tanh(2.0 * beta * m) - m;
  return 2.0 * m * c / (1.0 - 2.0 * m * beta * c);
}

double sigma2_sq_literal(double beta, double /*h*/, double m) {
  const double coth = 1.0 / std::tanh(2.0 * beta * m);
  return 2.0 * m * (coth - 1.0) / (2.0 * m * beta * (coth - m) - 1.0);
}

}  // namespace dichotomous

ClosedFormParams ClosedFormParams::from_config(const ExperimentConfig& cfg) {
  cfg.require_known({"betas", "fields", "tolerance"});
  ClosedFormParams p;
  if (cfg.has("betas") || cfg.has("fields")) {
    const auto betas = cfg.get_doubles("betas", {});
    const auto fields = cfg.get_doubles("fields", {});
    if (betas.size() != fields.size() || betas.empty()) {
      throw std::invalid_argument("betas and fields must be nonempty lists of equal length");
    }
    p.pairs.clear();
    for (std::size_t i = 0; i < betas.size(); ++i) p.pairs.emplace_back(betas[i], fields[i]);
  }
  p.tolerance = cfg.get_double("tolerance", p.tolerance);
  return p;
}

VerificationReport verify_closed_forms(const ClosedFormParams& p) {
  const Stopwatch clock;
  Json cases = Json::array();
  double worst = 0.0;
  std::size_t compared = 0;
  const auto check = [&](Json& entry, const char* name, double formula, double reference) {
    const double err = std::abs(formula - reference) / std::max(1.0, std::abs(reference));
    entry[name] = {{"formula", json_number(formula)}, {"reference", json_number(reference)}, {"error", err}};
    worst = std::max(worst, err);
    ++compared;
  };
  for (const auto& [beta, h] : p.pairs) {
    const GFunction g = dichotomous::model(beta, h);
    const auto forms = dichotomous::closed_forms_at_zero(beta, h);
    Json entry = {{"beta", beta}, {"h", h}};
    const double g2 = g_deriv(g, 2, 0.0);
    check(entry, "lambda1", forms.lambda1, g2);
    check(entry, "lambda3", forms.lambda3, g_deriv(g, 4, 0.0));
    if (g2 > 0.0 && g2 < beta) check(entry, "sigma1_sq", forms.sigma1_sq, 1.0 / g2 - 1.0 / beta);
    double m = 0.0;
    for (double x : find_minima(g)) m = std::max(m, x);
    if (m > 1e-6) {
      const double gm = g_deriv(g, 2, m);
      entry["m"] = m;
      entry["fixed_point_residual"] = 2.0 * m - std::tanh(beta * (m + h)) - std::tanh(beta * (m - h));
      check(entry, "lambda2", dichotomous::lambda2(beta, h, m), gm);
      check(entry, "sigma2_sq", dichotomous::sigma2_sq(beta, h, m), 1.0 / gm - 1.0 / beta);
      entry["sigma2_sq_literal"] = json_number(dichotomous::sigma2_sq_literal(beta, h, m));
    }
    const double g6 = g_deriv(g, 6, 0.0);
    entry["lambda4"] = {{"literal", forms.lambda4_literal},
                        {"tanh6_variant", forms.lambda4_corrected},
                        {"reference", g6}};
    cases.push_back(std::move(entry));
  }
  VerificationReport r;
  r.experiment = "closed_forms";
  Json pairs = Json::array();
  for (const auto& [beta, h] : p.pairs) pairs.push_back({{"beta", beta}, {"h", h}});
  r.inputs = {{"pairs", pairs}, {"nu", "two_point h 0.5"}};
  r.empirical = {{"cases", cases}};
  r.metrics = {{"max_relative_error", worst}, {"comparisons", compared}};
  r.tolerances = {{"max_relative_error", p.tolerance}};
  r.passed = worst <= p.tolerance;
  r.runtime_seconds = clock.seconds();
  return r;
}

// -- derivative audit -----------------------------------------------------------

DerivativeAuditParams DerivativeAuditParams::from_config(const ExperimentConfig& cfg) {
  cfg.require_known({"nu_list", "beta_list", "max_order", "points", "x_lo", "x_hi", "tolerance"});
  DerivativeAuditParams p;
  if (cfg.has("nu_list") || cfg.has("beta_list")) {
    const auto nus = split(cfg.get_string("nu_list", ""), ';');
    const auto betas = cfg.get_doubles("beta_list", {});
    if (nus.size() != betas.size()) throw std::invalid_argument("nu_list and beta_list must have equal length");
    p.cases.clear();
    for (std::size_t i = 0; i < nus.size(); ++i) p.cases.emplace_back(nus[i], betas[i]);
  }
  p.max_order = static_cast<int>(cfg.get_int("max_order", p.max_order));
  p.points = static_cast<std::size_t>(cfg.get_seed("points", p.points));
  p.x_lo = cfg.get_double("x_lo", p.x_lo);
  p.x_hi = cfg.get_double("x_hi", p.x_hi);
  p.tolerance = cfg.get_double("tolerance", p.tolerance);
  return p;
}

VerificationReport verify_derivatives(const DerivativeAuditParams& p) {
  const Stopwatch clock;
  if (p.max_order < 1 || p.max_order > kMaxDerivativeOrder) {
    throw std::invalid_argument("derivatives: max_order must lie in [1, 16]");
  }
  const auto xs = linspace(p.x_lo, p.x_hi, p.points);
  constexpr double step = 1e-3;
  Json cases = Json::array();
  double worst = 0.0;
  for (const auto& [spec, beta] : p.cases) {
    const GFunction g(beta, make_distribution(spec));
    std::vector<double> per_order;
    for (int order = 1; order <= p.max_order; ++order) {
      double order_worst = 0.0;
      for (double x : xs) {
        const auto central = [&](double hstep) {
          return (g.derivative(order - 1, x + hstep) - g.derivative(order - 1, x - hstep)) / (2.0 * hstep);
        };
        const double numeric = (4.0 * central(0.5 * step) - central(step)) / 3.0;
        const double analytic = g_deriv(g, order, x);
        order_worst = std::max(order_worst, std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic)));
      }
      per_order.push_back(order_worst);
      worst = std::max(worst, order_worst);
    }
    cases.push_back({{"nu", spec}, {"beta", beta}, {"max_relative_error_by_order", json_array(per_order)}});
  }
  VerificationReport r;
  r.experiment = "derivatives";
  Json inputs_cases = Json::array();
  for (const auto& [spec, beta] : p.cases) inputs_cases.push_back({{"nu", spec}, {"beta", beta}});
  r.inputs = {{"cases", inputs_cases}, {"max_order", p.max_order}, {"points", p.points},
              {"x_lo", p.x_lo},        {"x_hi", p.x_hi},          {"step", step}};
  r.empirical = {{"cases", cases}};
  r.metrics = {{"max_relative_error", worst}};
  r.tolerances = {{"max_relative_error", p.tolerance}};
  r.passed = worst < p.tolerance;
  r.runtime_seconds = clock.seconds();
  return r;
}

// -- phase formulas -------------------------------------------------------------

PhaseFormulaParams PhaseFormulaParams::from_config(const ExperimentConfig& cfg) {
  cfg.require_known({"h_grid", "f0_tolerance", "hc_tolerance", "betas", "fields", "tolerance"});
  PhaseFormulaParams p;
  p.h_grid = cfg.get_doubles("h_grid", p.h_grid);
  p.f0_tolerance = cfg.get_double("f0_tolerance", p.f0_tolerance);
  p.hc_tolerance = cfg.get_double("hc_tolerance", p.hc_tolerance);
  ExperimentConfig rest;
  for (const char* key : {"betas", "fields", "tolerance"}) {
    if (cfg.has(key)) rest.set(key, cfg.get_string(key, ""));
  }
  p.closed_forms = ClosedFormParams::from_config(rest);
  return p;
}

VerificationReport verify_phase_formulas(const PhaseFormulaParams& p) {
  const Stopwatch clock;
  for (double h : p.h_grid) {
    if (!(h >= 0.0 && h < 0.5)) throw std::invalid_argument("phase_formulas: h_grid must lie in [0, 1/2)");
  }
  std::vector<double> f_values;
  for (double h : p.h_grid) f_values.push_back(dichotomous::critical_beta(h));
  const double f0 = dichotomous::critical_beta(0.0);
  const double hc_numeric = dichotomous::tricritical_field();
  const double hc_formula = dichotomous::tricritical_field_formula();

  struct Regime {
    const char* name;
    double h;
    double beta;
    Phase expected;
  };
  const std::vector<Regime> regimes = {
      {"paramagnetic", 0.2, 0.9, Phase::paramagnetic},
      {"ferromagnetic", 0.2, 1.5, Phase::ferromagnetic},
      {"second_order", 0.2, dichotomous::critical_beta(0.2), Phase::second_order},
      {"tricritical", hc_numeric, dichotomous::second_order_beta(hc_numeric), Phase::tricritical},
      {"first_order", 0.46, dichotomous::critical_beta(0.46), Phase::first_order},
      {"strong_field", 0.6, 3.0, Phase::paramagnetic},
  };
  Json phases = Json::array();
  bool phases_ok = true;
  double lambda4_literal = 0.0;
  double lambda4_variant = 0.0;
  double lambda4_reference = 0.0;
  for (const auto& regime : regimes) {
    const GFunction g = dichotomous::model(regime.beta, regime.h);
    const auto cls = classify_phase(g);
    const bool ok = cls.phase == regime.expected;
    phases_ok = phases_ok && ok;
    Json minima = Json::array();
    for (const auto& info : cls.minima) minima.push_back(minimum_json(info));
    phases.push_back({{"regime", regime.name},
                      {"h", regime.h},
                      {"beta", regime.beta},
                      {"expected", to_string(regime.expected)},
                      {"phase", to_string(cls.phase)},
                      {"global_minima", minima},
                      {"ok", ok}});
    if (regime.expected == Phase::tricritical) {
      const auto forms = dichotomous::closed_forms_at_zero(regime.beta, regime.h);
      lambda4_literal = forms.lambda4_literal;
      lambda4_variant = forms.lambda4_corrected;
      lambda4_reference = g_deriv(g, 6, 0.0);
    }
  }

  const auto closed = verify_closed_forms(p.closed_forms);
  const double f0_error = std::abs(f0 - 1.0);
  const double hc_error = std::abs(hc_numeric - hc_formula);

  VerificationReport r;
  r.experiment = "phase_formulas";
  r.inputs = {{"h_grid", json_array(p.h_grid)}, {"closed_forms", closed.inputs}};
  r.theory = {{"h_c_formula", hc_formula}, {"f0", 1.0}};
  r.empirical = {{"f", json_array(f_values)},
                 {"f0", f0},
                 {"h_c", hc_numeric},
                 {"phases", phases},
                 {"lambda4", {{"literal", lambda4_literal},
                              {"tanh6_variant", lambda4_variant},
                              {"reference", lambda4_reference}}},
                 {"closed_forms", closed.empirical}};
  r.metrics = {{"f0_error", f0_error},
               {"h_c_error", hc_error},
               {"phases_ok", phases_ok},
               {"closed_forms_max_relative_error", closed.metrics["max_relative_error"]}};
  r.tolerances = {{"f0_error", p.f0_tolerance},
                  {"h_c_error", p.hc_tolerance},
                  {"closed_forms_max_relative_error", p.closed_forms.tolerance}};
  r.passed = f0_error <= p.f0_tolerance && hc_error <= p.hc_tolerance && phases_ok && closed.passed;
  r.runtime_seconds = clock.seconds();
  return r;
}

// -- MC validity ------------------------------------------------------------------

McValidityParams McValidityParams::from_config(const ExperimentConfig& cfg) {
  cfg.require_known({"n", "beta", "nu", "seed", "samples", "chains", "thin", "burn_in", "tolerance"});
  McValidityParams p;
  p.n = static_cast<std::size_t>(cfg.get_seed("n", p.n));
  p.beta = cfg.get_double("beta", p.beta);
  p.nu = cfg.get_string("nu", p.nu);
  p.seed = cfg.get_seed("seed", p.seed);
  p.samples = static_cast<std::size_t>(cfg.get_seed("samples", p.samples));
  p.chains = static_cast<std::size_t>(cfg.get_seed("chains", p.chains));
  p.thin = static_cast<std::size_t>(cfg.get_seed("thin", p.thin));
  p.burn_in = static_cast<std::size_t>(cfg.get_seed("burn_in", p.burn_in));
  p.tolerance = cfg.get_double("tolerance", p.tolerance);
  return p;
}

VerificationReport verify_mc_validity(const McValidityParams& p) {
  const Stopwatch clock;
  if (p.chains == 0 || p.samples < p.chains || p.thin == 0) {
    throw std::invalid_argument("mc_validity: need chains >= 1, samples >= chains and thin >= 1");
  }
  const auto fields = sample_fields(make_distribution(p.nu), p.n, p.seed);
  const auto exact = exact_log_pmf(fields, p.beta);
  const std::size_t per_chain = (p.samples + p.chains - 1) / p.chains;
  ChainConfig cfg;
  cfg.beta = p.beta;
  cfg.fields = fields;
  cfg.burn_in = p.burn_in;
  cfg.thin = p.thin;
  cfg.sweeps = p.burn_in + per_chain * p.thin;
  cfg.seed = p.seed;
  const auto samples = run_glauber_chains(cfg, p.chains);
  const auto est = empirical_pmf(samples, p.n);
  const double tv = total_variation(est, exact);

  std::vector<double> exact_p(p.n + 1);
  std::size_t beyond_3se = 0;
  for (std::size_t i = 0; i <= p.n; ++i) {
    exact_p[i] = std::exp(exact.log_p[i]);
    if (std::abs(est.probability[i] - exact_p[i]) > 3.0 * est.std_error[i]) ++beyond_3se;
  }

  VerificationReport r;
  r.experiment = "mc_validity";
  r.inputs = {{"n", p.n},           {"beta", p.beta},       {"nu", p.nu},
              {"seed", p.seed},     {"samples", p.samples}, {"chains", p.chains},
              {"thin", p.thin},     {"burn_in", p.burn_in}, {"sweeps_per_chain", cfg.sweeps}};
  r.theory = {{"probability", json_array(exact_p)}};
  r.empirical = {{"probability", json_array(est.probability)},
                 {"std_error", json_array(est.std_error)},
                 {"retained_samples", est.samples}};
  r.metrics = {{"total_variation", tv}, {"bins_beyond_3_std_errors", beyond_3se}};
  r.tolerances = {{"total_variation", p.tolerance}};
  r.passed = tv < p.tolerance;
  r.runtime_seconds = clock.seconds();
  return r;
}

// -- dispatch ---------------------------------------------------------------------

std::vector<std::string> experiment_names() {
  return {"hs_consistency", "uniform_convergence", "transfer_identity", "rate",       "counterexample",
          "closed_forms",   "derivatives",         "phase_formulas",    "mc_validity"};
}

VerificationReport run_experiment(std::string_view name, const ExperimentConfig& cfg) {
  if (name == "hs_consistency") return verify_hs_consistency(HsConsistencyParams::from_config(cfg));
  if (name == "uniform_convergence") return verify_uniform_convergence(UniformConvergenceParams::from_config(cfg));
  if (name == "transfer_identity") return verify_transfer_identity(TransferIdentityParams::from_config(cfg));
  if (name == "rate") return verify_rate(RateParams::from_config(cfg));
  if (name == "counterexample") return verify_counterexample(CounterexampleParams::from_config(cfg));
  if (name == "closed_forms") return verify_closed_forms(ClosedFormParams::from_config(cfg));
  if (name == "derivatives") return verify_derivatives(DerivativeAuditParams::from_config(cfg));
  if (name == "phase_formulas") return verify_phase_formulas(PhaseFormulaParams::from_config(cfg));
  if (name == "mc_validity") return verify_mc_validity(McValidityParams::from_config(cfg));
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

}  // namespace rfcw
