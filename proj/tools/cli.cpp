#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "rfcw/exact_engine.hpp"
#include "rfcw/g_function.hpp"
#include "rfcw/mc_engine.hpp"
#include "rfcw/rate_theory.hpp"
#include "rfcw/verifier.hpp"

#ifndef RFCW_VERSION
#define RFCW_VERSION "0.0.0"
#endif

namespace rfcw::cli {
namespace {

using nlohmann::json;

void write_json(const json& v, std::string& out, int indent, int depth) {
  const bool pretty = indent >= 0;
  const auto newline = [&](int level) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * level), ' ');
  };
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += pretty ? ": " : ":";
        write_json(it.value(), out, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(v.begin(), v.end(), [](const json& e) { return e.is_structured(); });
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += flat && pretty ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        write_json(e, out, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
  }
}

// Writes `text` to `path`, or to `out` when path is empty. Returns true when a file was written.
bool emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return false;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  file << text;
  if (!file) throw std::runtime_error("error writing '" + path + "'");
  return true;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Common {
  std::string nu;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct AnalyzeOpts : Common {
  double bound = kDefaultSearchBound;
};

struct ExactOpts : Common {
  std::size_t n = 0;
};

struct McOpts : Common {
  std::size_t n = 0;
  std::size_t sweeps = 10000;
  std::size_t burn_in = 10;
  std::size_t thin = 1;
  std::size_t chains = 1;
};

struct RatesOpts : Common {
  std::vector<double> x;
  std::optional<double> m_hint;
};

struct VerifyOpts {
  std::string experiment;
  std::string config;
  std::string out;
  bool runtime = false;
};

void add_model_options(CLI::App* sub, Common& c, bool need_seed) {
  sub->add_option("--nu", c.nu, "field distribution, e.g. \"two_point 0.3 0.5\"")->required();
  sub->add_option("--beta", c.beta, "inverse temperature")->required()->check(CLI::PositiveNumber);
  if (need_seed) sub->add_option("--seed", c.seed, "field and chain seed")->capture_default_str();
  sub->add_option("--out", c.out, "output path (default: stdout)");
}

json minimum_record(const MinimumInfo& info) {
  return {{"m", info.location},
          {"k", info.type},
          {"lambda", info.strength},
          {"height", info.height},
          {"broadness", json_number(info.broadness)},
          {"cond_radius", info.cond_radius},
          {"global", info.is_global},
          {"mdp_ok", info.mdp_condition_ok}};
}

std::string run_analyze(const AnalyzeOpts& o, std::ostream& out, bool& wrote) {
  const auto nu = make_distribution(o.nu);
  const GFunction g(o.beta, nu);
  const auto minima = analyze_minima(g);
  const auto phase = classify_phase(g);
  json doc = {{"beta", o.beta}, {"nu_spec", nu.describe()}, {"minima", json::array()},
              {"phase", std::string(to_string(phase.phase))}};
  for (const auto& info : minima) doc["minima"].push_back(minimum_record(info));
  wrote = emit(o.out, dump_json(doc) + "\n", out);
  std::string locs;
  for (const auto& info : phase.minima) locs += (locs.empty() ? "" : ", ") + num(info.location);
  return "analyze: phase " + std::string(to_string(phase.phase)) + ", " + std::to_string(minima.size()) +
         " local minima, global at {" + locs + "}";
}

std::string run_exact(const ExactOpts& o, std::ostream& out, bool& wrote) {
  const auto fields = sample_fields(make_distribution(o.nu), o.n, o.seed);
  const auto pmf = exact_log_pmf(fields, o.beta);
  json rows = json::array();
  double mean = 0.0;
  for (std::size_t i = 0; i <= pmf.n; ++i) {
    rows.push_back({pmf.magnetization(i), json_number(pmf.log_p[i])});
    mean += std::exp(pmf.log_p[i]) * static_cast<double>(std::abs(pmf.magnetization(i)));
  }
  json doc = {{"n", o.n}, {"beta", o.beta}, {"nu", o.nu}, {"seed", o.seed}, {"log_Z", pmf.log_Z}, {"pmf", rows}};
  wrote = emit(o.out, dump_json(doc) + "\n", out);
  return "exact: n=" + std::to_string(o.n) + " log_Z=" + num(pmf.log_Z) +
         " E|S_n|/n=" + num(mean / static_cast<double>(o.n));
}

std::string run_mc(const McOpts& o, std::ostream& out, bool& wrote) {
  ChainConfig cfg;
  cfg.beta = o.beta;
  cfg.fields = sample_fields(make_distribution(o.nu), o.n, o.seed);
  cfg.sweeps = o.sweeps;
  cfg.burn_in = o.burn_in;
  cfg.thin = o.thin;
  cfg.seed = o.seed;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(e.what());
  }
  const auto samples = run_glauber_chains(cfg, o.chains);

  const std::string samples_path = (o.out.empty() ? std::string("mc") : o.out) + ".samples.bin";
  {
    std::ofstream bin(samples_path, std::ios::binary);
    if (!bin) throw std::runtime_error("cannot write '" + samples_path + "'");
    for (std::int32_t s : samples) {
      const auto u = static_cast<std::uint32_t>(s);
      const char bytes[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                             static_cast<char>((u >> 16) & 0xff), static_cast<char>((u >> 24) & 0xff)};
      bin.write(bytes, 4);
    }
  }
  double mean = 0.0;
  for (auto s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (auto s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.size());
  std::map<std::int32_t, std::size_t> histogram;
  for (auto s : samples) ++histogram[s];
  json hist = json::array();
  for (const auto& [s, c] : histogram) hist.push_back({s, c});

  json doc = {{"config",
               {{"n", o.n}, {"beta", o.beta}, {"nu", o.nu}, {"seed", o.seed}, {"sweeps", o.sweeps},
                {"burn_in", o.burn_in}, {"thin", o.thin}, {"chains", o.chains}}},
              {"samples_path", samples_path},
              {"samples", samples.size()},
              {"summary", {{"mean", mean}, {"var", var}, {"histogram", hist}}}};
  wrote = emit(o.out, dump_json(doc) + "\n", out);
  return "mc: " + std::to_string(samples.size()) + " samples, mean S_n=" + num(mean) + " var=" + num(var);
}

std::string run_rates(const RatesOpts& o, std::ostream& out, bool& wrote) {
  const GFunction g(o.beta, make_distribution(o.nu));
  const auto minima = analyze_minima(g);
  if (minima.empty()) throw std::runtime_error("G has no local minimum");
  const MinimumInfo* chosen = nullptr;
  for (const auto& info : minima) {
    if (o.m_hint) {
      if (!chosen || std::abs(info.location - *o.m_hint) < std::abs(chosen->location - *o.m_hint)) chosen = &info;
    } else if (info.is_global) {
      chosen = &info;
    }
  }
  const auto spec = RateSpec::from_minimum(*chosen, o.beta);
  const LdpRate ldp(g);
  std::vector<double> xs = o.x;
  if (xs.empty()) {
    for (int i = 0; i <= 20; ++i) xs.push_back(-1.0 + 0.1 * i);
    xs.back() = 1.0;
  }
  std::string csv = "x,ldp_rate,mdp_rate\n";
  for (double x : xs) {
    const std::string l = std::abs(x) <= 1.0 ? format_double(ldp(x)) : std::string("inf");
    csv += format_double(x) + "," + l + "," + format_double(mdp_rate(spec, x)) + "\n";
  }
  wrote = emit(o.out, csv, out);
  return "rates: " + std::to_string(xs.size()) + " points, minimum m=" + num(chosen->location) +
         " k=" + std::to_string(spec.k) + " lambda=" + num(spec.lambda);
}

std::string run_verify(const VerifyOpts& o, std::ostream& out, bool& wrote, bool& passed) {
  const auto cfg = o.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(o.config);
  const auto report = run_experiment(o.experiment, cfg);
  passed = report.passed;
  wrote = emit(o.out, dump_json(report.to_json(o.runtime)) + "\n", out);
  return "verify: " + report.experiment + (report.passed ? " PASS" : " FAIL") + " (" +
         num(report.runtime_seconds) + " s)";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump_json(const nlohmann::json& value, int indent) {
  std::string out;
  write_json(value, out, indent, 0);
  return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-field Curie-Weiss model: minima of G, exact and Monte Carlo laws of S_n, rate functions."};
  app.name("rfcw");
  app.set_version_flag("--version", std::string("rfcw ") + RFCW_VERSION + " (config schema " +
                                        std::to_string(kConfigSchemaVersion) + ")");
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker cap for internal parallelism")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  app.require_subcommand(1);

  AnalyzeOpts analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "locate and classify the minima of G");
  add_model_options(analyze_cmd, analyze, false);
  analyze_cmd->add_option("--search-bound", analyze.bound, "minima are searched in [-B, B]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ExactOpts exact;
  auto* exact_cmd = app.add_subcommand("exact", "exact law of S_n for one field realization");
  exact_cmd->add_option("--n", exact.n, "number of spins")->required()->check(CLI::Range(std::size_t{1}, kMaxExactSize));
  add_model_options(exact_cmd, exact, true);

  McOpts mc;
  auto* mc_cmd = app.add_subcommand("mc", "Glauber dynamics samples of S_n");
  mc_cmd->add_option("--n", mc.n, "number of spins")->required()->check(CLI::PositiveNumber);
  add_model_options(mc_cmd, mc, true);
  mc_cmd->add_option("--sweeps", mc.sweeps, "sweeps per chain, burn-in included")->capture_default_str();
  mc_cmd->add_option("--burn-in", mc.burn_in, "discarded sweeps")->capture_default_str();
  mc_cmd->add_option("--thin", mc.thin, "sweeps between retained samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  mc_cmd->add_option("--chains", mc.chains, "independent chains")->check(CLI::PositiveNumber)->capture_default_str();

  RatesOpts rates;
  auto* rates_cmd = app.add_subcommand("rates", "CSV of the large- and moderate-deviation rates");
  add_model_options(rates_cmd, rates, false);
  rates_cmd->add_option("--x", rates.x, "evaluation points (default: 21 points on [-1, 1])")->delimiter(',');
  rates_cmd->add_option("--m", rates.m_hint, "use the minimum nearest to this point (default: largest global)");

  VerifyOpts verify;
  auto* verify_cmd = app.add_subcommand("verify", "run a verification experiment");
  verify_cmd->add_option("--experiment", verify.experiment, "experiment name")
      ->required()
      ->check(CLI::IsMember(experiment_names()));
  verify_cmd->add_option("--config", verify.config, "key = value config file")->check(CLI::ExistingFile);
  verify_cmd->add_option("--out", verify.out, "report path (default: stdout)");
  verify_cmd->add_flag("--runtime", verify.runtime, "include the runtime in the report");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  set_max_threads(threads);

  try {
    bool wrote = false;
    bool passed = true;
    std::string summary;
    if (*analyze_cmd) summary = run_analyze(analyze, out, wrote);
    else if (*exact_cmd) summary = run_exact(exact, out, wrote);
    else if (*mc_cmd) summary = run_mc(mc, out, wrote);
    else if (*rates_cmd) summary = run_rates(rates, out, wrote);
    else if (*verify_cmd) summary = run_verify(verify, out, wrote, passed);
    (wrote ? out : err) << summary << '\n';
    return passed ? kExitOk : kExitFailed;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace rfcw::cli
