#include "ipp/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ipp/expectation.hpp"
#include "ipp/oracle.hpp"
#include "ipp/sampling.hpp"
#include "ipp/semigroup.hpp"
#include "ipp/trading.hpp"

namespace ipp {

namespace {

using nlohmann::json;

// All emitted numbers carry 12 significant digits; error bounds ride along
// with values so consumers never need a global epsilon.
double sig12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

json num(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(sig12(v));
}

RateInterval parse_rates(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ValidationError("rates must be \"lo,hi\"");
  double lo, hi;
  try {
    lo = std::stod(text.substr(0, comma));
    hi = std::stod(text.substr(comma + 1));
  } catch (const std::logic_error&) {
    throw ValidationError("rates must be \"lo,hi\" with numeric bounds");
  }
  return RateInterval(lo, hi);
}

// @file indirection for any JSON-bearing flag.
std::string load_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw ValidationError("cannot read file: " + arg.substr(1));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  return arg;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw ValidationError("expected a comma-separated number list");
  return out;
}

// Payoff over lattice states, from "kind:arg" shorthand or payoff JSON.
// n_max grows to fit the payoff's own support if needed.
LatticeFunction parse_lattice_payoff(const std::string& spec, long n_max) {
  const std::string text = load_arg(spec);
  if (!text.empty() && text.front() == '{') {
    json p = json::parse(text);
    const std::string kind = p.at("kind").get<std::string>();
    if (kind == "table") {
      auto values = p.at("values").get<std::vector<double>>();
      const long need = static_cast<long>(values.size()) - 1;
      LatticeFunction g(std::move(values));
      return g.resized(std::max(n_max, need));
    }
    if (kind == "indicator") {
      const long z = p.at("target").is_array() ? p.at("target")[0].get<long>()
                                               : p.at("target").get<long>();
      const long top = std::max(n_max, z + 1);
      return LatticeFunction(top, [z](long n) { return n == z ? 1.0 : 0.0; });
    }
    if (kind == "capped_count") {
      const long cap = p.at("cap").get<long>();
      const long top = std::max(n_max, cap + 1);
      return LatticeFunction(top, [cap](long n) { return static_cast<double>(std::min(n, cap)); });
    }
    throw ValidationError("unsupported lattice payoff kind: " + kind);
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("payoff must be JSON or kind:arg");
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  if (kind == "indicator") {
    const long z = std::stol(arg);
    if (z < 0) throw ValidationError("indicator state must be >= 0");
    return LatticeFunction(std::max(n_max, z + 1), [z](long n) { return n == z ? 1.0 : 0.0; });
  }
  if (kind == "capped_count") {
    const long cap = std::stol(arg);
    if (cap < 0) throw ValidationError("cap must be >= 0");
    return LatticeFunction(std::max(n_max, cap + 1),
                           [cap](long n) { return static_cast<double>(std::min(n, cap)); });
  }
  if (kind == "table") {
    auto values = parse_number_list(arg);
    const long need = static_cast<long>(values.size()) - 1;
    return LatticeFunction(std::move(values)).resized(std::max(n_max, need));
  }
  throw ValidationError("unknown payoff shorthand: " + kind);
}

ConditioningPrefix parse_prefix(const std::string& text) {
  if (text.empty()) return ConditioningPrefix();
  json j = json::parse(load_arg(text));
  std::vector<std::pair<double, long>> observed;
  for (const auto& entry : j.at("observed")) {
    observed.emplace_back(entry.at("time").get<double>(), entry.at("count").get<long>());
  }
  return ConditioningPrefix(std::move(observed));
}

struct Options {
  std::string rates;
  std::string variable;
  std::string prefix;
  std::string payoff;
  std::string strategy;
  std::string path;
  std::string mode = "upper";
  std::string format = "json";
  std::string grid;
  double tol = 1e-6;
  double theta = 0.1;
  double delta = 0.0;
  double lambda_lo = -1.0;
  double lambda_hi = -1.0;
  double rate = 0.0;
  double horizon = 1.0;
  double s = 0.0;
  double t = 1.0;
  double epsilon = 1e-3;
  double policy_step = 1e-3;
  long n = 1024;
  long start = 0;
  long samples = 100000;
  std::uint64_t seed = 0;
};

Mode parse_mode(const std::string& m) {
  if (m == "upper") return Mode::upper;
  if (m == "lower") return Mode::lower;
  throw ValidationError("mode must be upper or lower");
}

int dispatch(const std::string& sub, const Options& opt, std::ostream& out) {
  SemigroupConfig cfg;
  cfg.tol = opt.tol;
  cfg.theta = opt.theta;

  if (sub == "renewal") {
    const RateInterval rates = parse_rates(opt.rates);
    const auto [lo, hi] = renewal_time_bounds(rates);
    out << json{{"lower", num(lo)}, {"upper", num(hi)}}.dump() << '\n';
    return 0;
  }

  if (sub == "expect") {
    const RateInterval rates = parse_rates(opt.rates);
    const FinitaryVariable var = FinitaryVariable::from_json(load_arg(opt.variable));
    const ConditioningPrefix prefix = parse_prefix(opt.prefix);
    const Mode mode = parse_mode(opt.mode);
    const ExpectationResult r =
        mode == Mode::upper ? upper_expectation_finitary(var, rates, prefix, cfg)
                            : lower_expectation_finitary(var, rates, prefix, cfg);
    out << json{{"value", num(r.value)},
                {"error_bound", num(r.error_bound)},
                {"euler_bound", num(r.euler_bound)},
                {"truncation_bound", num(r.truncation_bound)},
                {"mode", opt.mode}}
               .dump()
        << '\n';
    return 0;
  }

  if (sub == "semigroup") {
    RateInterval rates = (opt.lambda_lo >= 0.0 && opt.lambda_hi >= 0.0)
                             ? RateInterval(opt.lambda_lo, opt.lambda_hi)
                             : parse_rates(opt.rates);
    const long n_max = cfg.lattice_size(0, rates.upper * opt.delta);
    const LatticeFunction g = parse_lattice_payoff(opt.payoff, n_max);
    const SemigroupResult r = semigroup_apply(g, opt.delta, rates, parse_mode(opt.mode), cfg);
    json values = json::object();
    for (long s = 0; s <= r.g.n_max(); ++s) {
      values[std::to_string(s)] = num(r.g.at(s));
    }
    out << json{{"values", values}, {"error_bound", num(r.error_bound)}, {"steps", r.steps}}
               .dump()
        << '\n';
    return 0;
  }

  if (sub == "simulate") {
    const CountingPath path =
        sample_path(constant_rate_policy(opt.rate), opt.horizon, opt.seed);
    if (opt.format == "csv") {
      out << path_to_csv(path);
    } else {
      json jumps = json::array();
      for (double r : path.jump_times()) jumps.push_back(num(r));
      out << json{{"horizon", num(path.horizon())}, {"jumps", jumps}}.dump() << '\n';
    }
    return 0;
  }

  if (sub == "superhedge") {
    const RateInterval rates = parse_rates(opt.rates);
    const long n_max = cfg.lattice_size(opt.start, rates.upper * (opt.t - opt.s));
    const LatticeFunction g = parse_lattice_payoff(opt.payoff, n_max);
    const Superhedge hedge = synthesize_superhedge(g, opt.s, opt.t, opt.n, rates, opt.start);
    json j = json::parse(superhedge_to_json(hedge));
    j["initial_capital"] = num(hedge.initial_capital);
    j["delta_margin"] = num(hedge.delta_margin);
    out << j.dump() << '\n';
    return 0;
  }

  if (sub == "coherence") {
    const CapitalLedger ledger = strategy_from_json(load_arg(opt.strategy));
    const CountingPath omega = path_from_json(load_arg(opt.path));
    const FalsifierResult r = coherence_falsify(ledger, opt.t, omega, opt.epsilon);
    json jumps = json::array();
    for (double x : r.path.jump_times()) jumps.push_back(num(x));
    out << json{{"path", {{"horizon", num(r.path.horizon())}, {"jumps", jumps}}},
                {"settlement_time", num(r.settlement_time)},
                {"capital_at_cut", num(r.capital_at_cut)},
                {"settlement_capital", num(r.settlement_capital)}}
               .dump()
        << '\n';
    return 0;
  }

  if (sub == "oracle") {
    const RateInterval rates = parse_rates(opt.rates);
    const FinitaryVariable var = FinitaryVariable::from_json(load_arg(opt.variable));
    const Mode mode = parse_mode(opt.mode);
    const ExpectationResult engine =
        mode == Mode::upper ? upper_expectation_finitary(var, rates, ConditioningPrefix(), cfg)
                            : lower_expectation_finitary(var, rates, ConditioningPrefix(), cfg);
    std::vector<double> grid = opt.grid.empty()
                                   ? std::vector<double>{rates.lower,
                                                         0.5 * (rates.lower + rates.upper),
                                                         rates.upper}
                                   : parse_number_list(opt.grid);
    for (double r : grid) {
      if (!rates.contains(r)) throw ValidationError("grid rate outside the interval");
    }
    const double envelope = constant_rate_envelope(var, grid, mode);
    const RatePolicy policy = extract_policy(var, rates, opt.policy_step, mode, cfg);
    const SimulationResult sim = policy_simulate(var, policy, opt.samples, opt.seed);
    const bool env_ok = mode == Mode::upper
                            ? envelope <= engine.value + engine.error_bound + 1e-9
                            : envelope >= engine.value - engine.error_bound - 1e-9;
    const bool sim_ok =
        std::abs(sim.mean - engine.value) <= sim.ci_halfwidth + engine.error_bound;
    out << json{{"envelope", num(envelope)},
                {"simulated_mean", num(sim.mean)},
                {"ci", num(sim.ci_halfwidth)},
                {"engine_value", num(engine.value)},
                {"engine_error_bound", num(engine.error_bound)},
                {"verdict", env_ok && sim_ok ? "ok" : "mismatch"}}
               .dump()
        << '\n';
    return 0;
  }

  throw ValidationError("unknown subcommand: " + sub);
}

}  // namespace

namespace {

// IPP_CONFIG may point at a JSON file of defaults; explicit flags win.
void apply_config_file(Options& opt) {
  const char* path = std::getenv("IPP_CONFIG");
  if (path == nullptr) return;
  std::ifstream in(path);
  if (!in) throw ValidationError(std::string("cannot read IPP_CONFIG file: ") + path);
  json j = json::parse(in, nullptr, true, true);
  if (j.contains("tol")) opt.tol = j["tol"].get<double>();
  if (j.contains("theta")) opt.theta = j["theta"].get<double>();
  if (j.contains("seed")) opt.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("rates")) opt.rates = j["rates"].get<std::string>();
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"imprecise Poisson process toolkit"};
  app.require_subcommand(1);
  Options opt;
  try {
    apply_config_file(opt);
  } catch (const std::exception& e) {
    err << "validation error: " << e.what() << '\n';
    return 2;
  }

  auto add_rates = [&](CLI::App* sub) {
    sub->add_option("--rates", opt.rates, "rate bounds lo,hi");
  };

  CLI::App* renewal = app.add_subcommand("renewal", "closed-form renewal time bounds");
  add_rates(renewal);

  CLI::App* expect = app.add_subcommand("expect", "conditional upper/lower expectation");
  add_rates(expect);
  expect->add_option("--variable", opt.variable, "finitary variable JSON (or @file)");
  expect->add_option("--prefix", opt.prefix, "conditioning prefix JSON (or @file)");
  expect->add_option("--mode", opt.mode, "upper|lower");
  expect->add_option("--tol", opt.tol, "Euler error budget");
  expect->add_option("--theta", opt.theta, "per-step intensity mass cap");

  CLI::App* semigroup = app.add_subcommand("semigroup", "apply the semigroup to a payoff");
  add_rates(semigroup);
  semigroup->add_option("--lambda-lo", opt.lambda_lo, "lower rate");
  semigroup->add_option("--lambda-hi", opt.lambda_hi, "upper rate");
  semigroup->add_option("--delta", opt.delta, "duration");
  semigroup->add_option("--mode", opt.mode, "upper|lower");
  semigroup->add_option("--payoff", opt.payoff, "payoff JSON or kind:arg");
  semigroup->add_option("--tol", opt.tol, "Euler error budget");
  semigroup->add_option("--theta", opt.theta, "per-step intensity mass cap");

  CLI::App* simulate = app.add_subcommand("simulate", "sample a constant-rate path");
  simulate->add_option("--rate", opt.rate, "constant intensity");
  simulate->add_option("--horizon", opt.horizon, "time horizon");
  simulate->add_option("--seed", opt.seed, "RNG seed");
  simulate->add_option("--format", opt.format, "json|csv");

  CLI::App* superhedge = app.add_subcommand("superhedge", "build the grid superhedge");
  add_rates(superhedge);
  superhedge->add_option("--payoff", opt.payoff, "payoff JSON or kind:arg");
  superhedge->add_option("--s", opt.s, "grid start");
  superhedge->add_option("--t", opt.t, "grid end");
  superhedge->add_option("--n", opt.n, "grid cells");
  superhedge->add_option("--start", opt.start, "start state");

  CLI::App* coherence = app.add_subcommand("coherence", "falsify a guaranteed profit");
  coherence->add_option("--strategy", opt.strategy, "strategy JSON (or @file)");
  coherence->add_option("--path", opt.path, "observed path JSON (or @file)");
  coherence->add_option("--t", opt.t, "cut time");
  coherence->add_option("--epsilon", opt.epsilon, "profit margin to beat");

  CLI::App* oracle = app.add_subcommand("oracle", "bracket the engine with oracles");
  add_rates(oracle);
  oracle->add_option("--variable", opt.variable, "finitary variable JSON (or @file)");
  oracle->add_option("--mode", opt.mode, "upper|lower");
  oracle->add_option("--tol", opt.tol, "Euler error budget");
  oracle->add_option("--samples", opt.samples, "Monte-Carlo samples");
  oracle->add_option("--seed", opt.seed, "RNG seed");
  oracle->add_option("--grid", opt.grid, "envelope rates, comma separated");
  oracle->add_option("--policy-step", opt.policy_step, "policy bucket width");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    for (const auto* sub : app.get_subcommands()) {
      return dispatch(sub->get_name(), opt, out);
    }
    err << app.help();
    return 2;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << '\n';
    return 3;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "validation error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace ipp
