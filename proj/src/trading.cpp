#include "ipp/trading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ipp/semigroup.hpp"
#include "json.hpp"

namespace ipp {

bool StateFunction::nonnegative() const {
  for (double v : values_) {
    if (v < 0.0) return false;
  }
  return true;
}

double StateFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Strategy::Strategy(Sided sided, RateInterval rates, std::vector<Round> rounds,
                   StoppingTime close, std::optional<double> stake_bound)
    : sided_(sided), rates_(rates), rounds_(std::move(rounds)), close_(std::move(close)) {
  double largest = 0.0;
  for (const Round& r : rounds_) {
    if (sided_ == Sided::one) {
      if (!r.stake_up.nonnegative() || !r.stake_down.nonnegative()) {
        throw ValidationError("one-sided stakes must be nonnegative");
      }
    } else {
      if (!r.stake_down.values().empty()) {
        throw ValidationError("two-sided rounds carry a single stake");
      }
    }
    largest = std::max({largest, r.stake_up.max_abs(), r.stake_down.max_abs()});
  }
  if (sided_ == Sided::two && !rates_.degenerate()) {
    throw ValidationError("two-sided strategies require a degenerate rate interval");
  }
  stake_bound_ = stake_bound.value_or(largest);
  if (largest > stake_bound_ + 1e-12) {
    throw ValidationError("stake exceeds its declared bound");
  }
}

Strategy Strategy::scaled(double mu) const {
  if (!(mu > 0.0)) throw ValidationError("scale factor must be > 0");
  std::vector<Round> rounds;
  rounds.reserve(rounds_.size());
  for (const Round& r : rounds_) {
    auto scale_fn = [mu](const StateFunction& f) {
      std::vector<double> v = f.values();
      for (double& x : v) x *= mu;
      return StateFunction(std::move(v));
    };
    rounds.push_back(Round{r.open, scale_fn(r.stake_up), scale_fn(r.stake_down)});
  }
  return Strategy(sided_, rates_, std::move(rounds), close_, stake_bound_ * mu);
}

const Strategy& CapitalLedger::single() const {
  if (strategies.size() != 1) throw ValidationError("ledger must hold exactly one strategy");
  return strategies.front();
}

CapitalLedger merge(const CapitalLedger& a, const CapitalLedger& b) {
  CapitalLedger out;
  out.initial = a.initial + b.initial;
  out.strategies = a.strategies;
  out.strategies.insert(out.strategies.end(), b.strategies.begin(), b.strategies.end());
  return out;
}

CapitalLedger scale(const CapitalLedger& ledger, double mu) {
  if (!(mu > 0.0)) throw ValidationError("scale factor must be > 0");
  CapitalLedger out;
  out.initial = mu * ledger.initial;
  for (const Strategy& s : ledger.strategies) out.strategies.push_back(s.scaled(mu));
  return out;
}

namespace {

std::vector<TimeOrBeyond> round_boundaries(const Strategy& s, const CountingPath& path,
                                           StopEvalCache& cache) {
  std::vector<TimeOrBeyond> taus;
  taus.reserve(s.rounds().size() + 1);
  for (std::size_t i = 0; i <= s.rounds().size(); ++i) {
    taus.push_back(s.open_of(i).eval(path, cache));
  }
  for (std::size_t i = 1; i < taus.size(); ++i) {
    if (taus[i] < taus[i - 1]) {
      throw ValidationError("stopping times are not increasing on this path");
    }
  }
  return taus;
}

double strategy_capital_terms(const Strategy& s, const CountingPath& path, double t) {
  StopEvalCache cache;
  cache.path = &path;
  const std::vector<TimeOrBeyond> taus = round_boundaries(s, path, cache);
  double total = 0.0;
  for (std::size_t k = 0; k < s.rounds().size(); ++k) {
    const double a = taus[k].clamp(t);
    const double b = taus[k + 1].clamp(t);
    if (!(b > a)) continue;  // zero terms are skipped
    const long na = path.eval(a);
    const long nb = path.eval(b);
    const long state = na;  // count when the round opened (a == tau_k here)
    const double dn = static_cast<double>(nb - na);
    const double dt = b - a;
    const Round& round = s.rounds()[k];
    if (s.sided() == Sided::one) {
      const double hu = round.stake_up.at(state);
      const double hd = round.stake_down.at(state);
      if (std::abs(hu) > s.stake_bound() + 1e-12 || std::abs(hd) > s.stake_bound() + 1e-12) {
        throw ValidationError("stake exceeds its declared bound");
      }
      total += hu * (dn - s.rates().upper * dt) + hd * (s.rates().lower * dt - dn);
    } else {
      const double h = round.stake_up.at(state);
      if (std::abs(h) > s.stake_bound() + 1e-12) {
        throw ValidationError("stake exceeds its declared bound");
      }
      total += h * (dn - s.rates().lower * dt);
    }
  }
  return total;
}

}  // namespace

double capital_process_eval(const CapitalLedger& ledger, const CountingPath& path, double t) {
  if (!(t >= 0.0) || t > path.horizon()) throw ValidationError("time outside [0, horizon]");
  double total = ledger.initial;
  for (const Strategy& s : ledger.strategies) total += strategy_capital_terms(s, path, t);
  return total;
}

bool increment_identity_check(const CapitalLedger& ledger, const CountingPath& path, double t,
                              double r) {
  const Strategy& s = ledger.single();
  if (!(t <= r)) throw ValidationError("need t <= r");
  StopEvalCache cache;
  cache.path = &path;
  const std::vector<TimeOrBeyond> taus = round_boundaries(s, path, cache);
  std::size_t k = s.rounds().size();
  for (std::size_t i = 0; i < s.rounds().size(); ++i) {
    const bool opens_before = !(TimeOrBeyond::at(t) < taus[i]);
    const bool closes_after = !(taus[i + 1] < TimeOrBeyond::at(r));
    if (opens_before && closes_after) {
      k = i;
      break;
    }
  }
  if (k == s.rounds().size()) {
    throw ValidationError("interval is not contained in a single round");
  }
  const double lhs =
      capital_process_eval(ledger, path, r) - capital_process_eval(ledger, path, t);
  const long state = path.eval(taus[k].value());
  const double dn = static_cast<double>(path.eval(r) - path.eval(t));
  double rhs;
  if (s.sided() == Sided::one) {
    const double hu = s.rounds()[k].stake_up.at(state);
    const double hd = s.rounds()[k].stake_down.at(state);
    rhs = (hu - hd) * (dn - s.rates().lower * (r - t)) -
          hu * (s.rates().upper - s.rates().lower) * (r - t);
  } else {
    rhs = s.rounds()[k].stake_up.at(state) * (dn - s.rates().lower * (r - t));
  }
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return std::abs(lhs - rhs) <= 1e-12 * scale;
}

Superhedge synthesize_superhedge(const LatticeFunction& g, double s, double t, long n,
                                 const RateInterval& rates, long start_state) {
  if (!(s >= 0.0) || !(t > s) || n < 1) throw ValidationError("need 0 <= s < t and n >= 1");
  if (start_state < 0) throw ValidationError("start state must be >= 0");
  const double width = (t - s) / static_cast<double>(n);
  if (width * rates.upper > 1.0) {
    throw ValidationError("grid too coarse: cell width times the upper rate must be <= 1");
  }

  // Ladder levels: ladder[j] = (I + width*G)^(n-j) g, so ladder[n] is the
  // payoff and ladder[0] prices the hedge.
  std::vector<std::vector<double>> ladder(static_cast<std::size_t>(n) + 1);
  LatticeFunction level = g;
  ladder[static_cast<std::size_t>(n)] = level.values();
  for (long j = n - 1; j >= 0; --j) {
    const LatticeFunction bump = generator_apply(level, rates, Mode::upper);
    std::vector<double> next = level.values();
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += width * bump.values()[i];
    level = LatticeFunction(next);
    ladder[static_cast<std::size_t>(j)] = std::move(next);
  }

  const StoppingTime scan = StoppingTime::two_jump_cell_scan(s, t, n);
  std::vector<Round> rounds;
  rounds.reserve(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) {
    const auto& lv = ladder[static_cast<std::size_t>(k + 1)];  // level the stakes read from
    std::vector<double> up(lv.size(), 0.0), down(lv.size(), 0.0);
    for (std::size_t x = 0; x + 1 < lv.size(); ++x) {
      const double d = lv[x + 1] - lv[x];
      up[x] = std::max(d, 0.0);
      down[x] = std::max(-d, 0.0);
    }
    const double open_time = s + width * static_cast<double>(k);
    rounds.push_back(Round{StoppingTime::min_of(StoppingTime::constant(open_time), scan),
                           StateFunction(std::move(up)), StateFunction(std::move(down))});
  }
  StoppingTime close = StoppingTime::min_of(StoppingTime::constant(t), scan);

  Superhedge hedge{
      Strategy(Sided::one, rates, std::move(rounds), std::move(close)),
      0.0, s, t, n,
      g.span() * rates.lower * width,
      std::move(ladder)};
  const auto& top = hedge.ladder.front();
  const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(start_state),
                                                top.size() - 1);
  hedge.initial_capital = top[idx] + hedge.delta_margin;
  return hedge;
}

SuperhedgeReport superhedge_verify(const Superhedge& hedge, const FinitaryVariable& var,
                                   const std::vector<CountingPath>& paths, double tol) {
  if (var.arity() != 1) throw ValidationError("superhedge_verify takes a single-time variable");
  if (var.times().back() > hedge.grid_end) {
    throw ValidationError("variable time beyond the hedge grid");
  }
  SuperhedgeReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  report.min_capital_on_complement = std::numeric_limits<double>::infinity();
  const double width = (hedge.grid_end - hedge.grid_start) / static_cast<double>(hedge.cells);
  const CapitalLedger ledger(hedge.initial_capital, hedge.strategy);
  for (const CountingPath& path : paths) {
    if (path.horizon() < hedge.grid_end) {
      throw ValidationError("path horizon does not cover the hedge grid");
    }
    ++report.total_paths;
    bool good = true;
    long prev = path.eval(hedge.grid_start);
    for (long k = 1; k <= hedge.cells; ++k) {
      const double edge = (k == hedge.cells) ? hedge.grid_end
                                             : hedge.grid_start + width * static_cast<double>(k);
      const long count = path.eval(edge);
      if (count > prev + 1) {
        good = false;
        break;
      }
      prev = count;
    }
    const double capital = capital_process_eval(ledger, path, hedge.grid_end);
    if (good) {
      ++report.good_paths;
      const double margin = capital - var.eval(path);
      report.worst_margin = std::min(report.worst_margin, margin);
      if (margin < -tol) ++report.violations;
    } else {
      ++report.complement_paths;
      report.min_capital_on_complement = std::min(report.min_capital_on_complement, capital);
    }
  }
  if (report.total_paths > 0) {
    report.complement_frequency =
        static_cast<double>(report.complement_paths) / static_cast<double>(report.total_paths);
  }
  if (report.good_paths == 0) report.worst_margin = 0.0;
  return report;
}

FalsifierResult coherence_falsify(const CapitalLedger& ledger, double t,
                                  const CountingPath& omega, double epsilon) {
  const Strategy& s = ledger.single();
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  if (!(t >= 0.0) || t > omega.horizon()) throw ValidationError("cut outside [0, horizon]");

  const double lower = s.rates().lower;
  const double tail = lower > 0.0 ? 1.0 / lower : 1.0;
  double latest = std::max(t, omega.horizon());
  for (std::size_t i = 0; i <= s.rounds().size(); ++i) {
    if (auto bound = s.open_of(i).static_time_bound()) latest = std::max(latest, *bound);
  }
  const double horizon = latest + tail + 1.0;

  const double capital_at_cut = capital_process_eval(ledger, omega, t);

  // If omega already settles below the bar, it is its own counterexample.
  {
    const CountingPath straight = omega.with_horizon(horizon);
    const double settle = capital_process_eval(ledger, straight, horizon);
    if (settle < capital_at_cut + epsilon) {
      return FalsifierResult{straight, horizon, capital_at_cut, settle};
    }
  }

  std::vector<double> jumps;
  for (double r : omega.jump_times()) {
    if (r <= t) jumps.push_back(r);
  }
  const double per_round = epsilon / static_cast<double>(std::max<std::size_t>(s.rounds().size(), 1));
  double cursor = t;

  for (std::size_t k = 0; k < s.rounds().size(); ++k) {
    const CountingPath probe(jumps, horizon);
    StopEvalCache cache;
    cache.path = &probe;
    const TimeOrBeyond tau_k = s.open_of(k).eval(probe, cache);
    const TimeOrBeyond tau_next = s.open_of(k + 1).eval(probe, cache);
    if (tau_next.is_finite() && tau_next.value() <= t) continue;  // settled before the cut
    if (tau_k.is_beyond()) break;  // this and all later rounds never open

    const double open_at = std::max(cursor, tau_k.value());
    const long state = probe.eval(tau_k.value());
    double net, up_stake;
    if (s.sided() == Sided::one) {
      up_stake = s.rounds()[k].stake_up.at(state);
      net = up_stake - s.rounds()[k].stake_down.at(state);
    } else {
      up_stake = 0.0;
      net = s.rounds()[k].stake_up.at(state);
    }

    if (net >= 0.0 || lower == 0.0) {
      // Stop jumping: the compensated term can only drift down.
      if (tau_next.is_beyond() || tau_next.value() >= horizon) {
        cursor = horizon;
        break;
      }
      cursor = std::max(cursor, tau_next.value());
      continue;
    }

    // Negative net stake: keep the count within lower*delta of the
    // compensator by jumping every 1/lower after a grace gap small enough
    // for this round's share of the budget.
    const double grace = std::min(per_round / ((-net) * lower + 1.0), 0.5 / lower);
    std::vector<double> tentative = jumps;
    for (double c = open_at + grace; c <= horizon; c += 1.0 / lower) tentative.push_back(c);
    const CountingPath extended(tentative, horizon);
    const TimeOrBeyond closed = s.open_of(k + 1).eval(extended);
    const double close_at = closed.is_beyond() ? horizon : std::min(closed.value(), horizon);
    for (double c = open_at + grace; c <= close_at; c += 1.0 / lower) jumps.push_back(c);
    if (closed.is_beyond() || closed.value() >= horizon) {
      cursor = horizon;
      break;
    }
    cursor = closed.value();
  }

  const CountingPath result(jumps, horizon);
  const double settle = capital_process_eval(ledger, result, horizon);
  return FalsifierResult{result, horizon, capital_at_cut, settle};
}

Strategy interleave_constant_strategies(const Strategy& a, const Strategy& b) {
  if (a.sided() != b.sided()) throw ValidationError("interleave needs matching sidedness");
  if (!(a.rates().lower == b.rates().lower && a.rates().upper == b.rates().upper)) {
    throw ValidationError("interleave needs matching rate intervals");
  }
  auto boundaries = [](const Strategy& s) {
    std::vector<double> out;
    for (std::size_t i = 0; i <= s.rounds().size(); ++i) {
      const StoppingTime& st = s.open_of(i);
      auto bound = st.static_time_bound();
      CountingPath empty(std::max(bound.value_or(0.0), 1.0));
      const TimeOrBeyond v = st.eval(empty);
      // Constant stopping times evaluate to the same finite value on every
      // path; anything else is out of scope here.
      if (v.is_beyond()) throw ValidationError("interleave needs constant stopping times");
      out.push_back(v.value());
    }
    return out;
  };
  auto constant_of = [](const StateFunction& f) {
    if (f.values().size() > 1) {
      throw ValidationError("interleave needs constant stakes");
    }
    return f.values().empty() ? 0.0 : f.values().front();
  };

  const std::vector<double> ta = boundaries(a);
  const std::vector<double> tb = boundaries(b);
  std::set<double> grid(ta.begin(), ta.end());
  grid.insert(tb.begin(), tb.end());
  std::vector<double> edges(grid.begin(), grid.end());

  auto active_stakes = [&](const Strategy& s, const std::vector<double>& bounds, double at,
                           double& up, double& down) {
    for (std::size_t k = 0; k < s.rounds().size(); ++k) {
      if (bounds[k] <= at && at < bounds[k + 1]) {
        up += constant_of(s.rounds()[k].stake_up);
        down += constant_of(s.rounds()[k].stake_down);
        return;
      }
    }
  };

  std::vector<Round> rounds;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double up = 0.0, down = 0.0;
    active_stakes(a, ta, edges[i], up, down);
    active_stakes(b, tb, edges[i], up, down);
    rounds.push_back(Round{StoppingTime::constant(edges[i]), StateFunction::constant(up),
                           a.sided() == Sided::one ? StateFunction::constant(down)
                                                   : StateFunction()});
  }
  return Strategy(a.sided(), a.rates(), std::move(rounds),
                  StoppingTime::constant(edges.back()));
}

namespace {

nlohmann::json state_fn_json(const StateFunction& f) { return f.values(); }

StateFunction state_fn_from(const nlohmann::json& j) {
  return StateFunction(j.get<std::vector<double>>());
}

nlohmann::json strategy_json(const Strategy& s) {
  nlohmann::json j;
  j["sided"] = s.sided() == Sided::one ? "one" : "two";
  j["rates"] = {{"lower", s.rates().lower}, {"upper", s.rates().upper}};
  j["stake_bound"] = s.stake_bound();
  nlohmann::json rounds = nlohmann::json::array();
  for (const Round& r : s.rounds()) {
    nlohmann::json round;
    round["tau"] = nlohmann::json::parse(r.open.to_json());
    if (s.sided() == Sided::one) {
      round["stake_up"] = state_fn_json(r.stake_up);
      round["stake_down"] = state_fn_json(r.stake_down);
    } else {
      round["stake"] = state_fn_json(r.stake_up);
    }
    rounds.push_back(std::move(round));
  }
  j["rounds"] = std::move(rounds);
  j["close"] = nlohmann::json::parse(s.close().to_json());
  return j;
}

Strategy strategy_from(const nlohmann::json& j) {
  const Sided sided = j.at("sided").get<std::string>() == "two" ? Sided::two : Sided::one;
  const RateInterval rates(j.at("rates").at("lower").get<double>(),
                           j.at("rates").at("upper").get<double>());
  std::vector<Round> rounds;
  for (const auto& round : j.at("rounds")) {
    Round r{StoppingTime::from_json(round.at("tau").dump()), StateFunction(), StateFunction()};
    if (sided == Sided::one) {
      r.stake_up = state_fn_from(round.at("stake_up"));
      r.stake_down = state_fn_from(round.at("stake_down"));
    } else {
      r.stake_up = state_fn_from(round.at("stake"));
    }
    rounds.push_back(std::move(r));
  }
  StoppingTime close = StoppingTime::from_json(j.at("close").dump());
  std::optional<double> bound;
  if (j.contains("stake_bound")) bound = j["stake_bound"].get<double>();
  return Strategy(sided, rates, std::move(rounds), std::move(close), bound);
}

}  // namespace

std::string strategy_to_json(const CapitalLedger& ledger) {
  nlohmann::json j;
  j["initial"] = ledger.initial;
  nlohmann::json arr = nlohmann::json::array();
  for (const Strategy& s : ledger.strategies) arr.push_back(strategy_json(s));
  j["strategies"] = std::move(arr);
  return j.dump();
}

CapitalLedger strategy_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad strategy JSON: ") + e.what());
  }
  CapitalLedger ledger;
  try {
    ledger.initial = j.at("initial").get<double>();
    for (const auto& s : j.at("strategies")) ledger.strategies.push_back(strategy_from(s));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad strategy JSON: ") + e.what());
  }
  return ledger;
}

std::string superhedge_to_json(const Superhedge& hedge) {
  nlohmann::json j;
  j["grid"] = {{"s", hedge.grid_start}, {"t", hedge.grid_end}, {"cells", hedge.cells}};
  j["initial_capital"] = hedge.initial_capital;
  j["delta_margin"] = hedge.delta_margin;
  j["ladder"] = hedge.ladder;
  j["strategy"] = strategy_json(hedge.strategy);
  return j.dump();
}

}  // namespace ipp
