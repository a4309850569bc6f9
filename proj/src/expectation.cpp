#include "ipp/expectation.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace ipp {

ConditioningPrefix::ConditioningPrefix(std::vector<std::pair<double, long>> obs)
    : observed(std::move(obs)) {
  double prev_t = -1.0;
  long prev_n = 0;
  for (const auto& [t, n] : observed) {
    if (!std::isfinite(t) || t < 0.0) throw ValidationError("observed times must be finite and >= 0");
    if (!(t > prev_t)) throw ValidationError("observed times must be strictly increasing");
    if (n < prev_n) throw ValidationError("observed counts must be nondecreasing");
    if (t == 0.0 && n != 0) throw ValidationError("a count at time 0 must be 0");
    prev_t = t;
    prev_n = n;
  }
}

namespace {

ExpectationResult engine_upper(const FinitaryVariable& var, const RateInterval& rates,
                               const ConditioningPrefix& prefix, const SemigroupConfig& cfg) {
  const auto& times = var.times();
  const std::size_t k = times.size();
  const std::size_t j0 = prefix.size();
  if (j0 > k) throw ValidationError("prefix longer than the variable's time grid");
  for (std::size_t i = 0; i < j0; ++i) {
    if (prefix.observed[i].first != times[i]) {
      throw ValidationError("prefix times must be a prefix of the variable's times");
    }
  }

  std::vector<long> zs;
  zs.reserve(k);
  for (std::size_t i = 0; i < j0; ++i) zs.push_back(prefix.observed[i].second);

  ExpectationResult out;
  out.mode = Mode::upper;
  if (j0 == k) {  // everything observed; the value is the payoff itself
    out.value = var.payoff(zs);
    return out;
  }

  const double anchor_time = j0 > 0 ? times[j0 - 1] : 0.0;
  const long start_state = j0 > 0 ? zs.back() : 0;
  const double mass = rates.upper * (times.back() - anchor_time);
  const long n_max = cfg.lattice_size(start_state, mass);
  var.spot_check_bound(n_max);

  // Backward induction over the remaining coordinates. At layer j (j
  // coordinates fixed) the continuation value as a function of the next
  // count is pushed through the semigroup over the gap to the previous
  // time and read at the current state. Sup-norm contraction lets child
  // bounds propagate additively.
  std::function<double(std::vector<long>&, std::size_t, double&)> value_at =
      [&](std::vector<long>& fixed, std::size_t j, double& bound) -> double {
    const double gap = times[j] - (j > 0 ? times[j - 1] : anchor_time);
    std::vector<double> u(static_cast<std::size_t>(n_max) + 1);
    double child_bound = 0.0;
    for (long n = 0; n <= n_max; ++n) {
      fixed.push_back(n);
      if (j + 1 == k) {
        u[static_cast<std::size_t>(n)] = var.payoff(fixed);
      } else {
        double cb = 0.0;
        u[static_cast<std::size_t>(n)] = value_at(fixed, j + 1, cb);
        child_bound = std::max(child_bound, cb);
      }
      fixed.pop_back();
    }
    SemigroupResult res = semigroup_apply(LatticeFunction(std::move(u)), gap, rates,
                                          Mode::upper, cfg);
    bound = child_bound + res.error_bound;
    const long state = j > 0 ? fixed.back() : start_state;
    return res.g.at(state);
  };

  double euler = 0.0;
  out.value = value_at(zs, j0, euler);
  out.euler_bound = euler;
  out.truncation_bound = lattice_truncation_budget(2.0 * var.bound(), mass, n_max - start_state);
  out.error_bound = out.euler_bound + out.truncation_bound;
  return out;
}

}  // namespace

ExpectationResult upper_expectation_finitary(const FinitaryVariable& var,
                                             const RateInterval& rates,
                                             const ConditioningPrefix& prefix,
                                             const SemigroupConfig& cfg) {
  return engine_upper(var, rates, prefix, cfg);
}

ExpectationResult lower_expectation_finitary(const FinitaryVariable& var,
                                             const RateInterval& rates,
                                             const ConditioningPrefix& prefix,
                                             const SemigroupConfig& cfg) {
  ExpectationResult r = engine_upper(FinitaryVariable::negated(var), rates, prefix, cfg);
  r.value = -r.value;
  r.mode = Mode::lower;
  return r;
}

std::pair<double, double> expected_increment_bounds(double s, double t,
                                                    const RateInterval& rates) {
  if (!(s >= 0.0) || !(t >= s)) throw ValidationError("need 0 <= s <= t");
  return {rates.lower * (t - s), rates.upper * (t - s)};
}

std::pair<double, double> renewal_time_bounds(const RateInterval& rates) {
  const double inf = std::numeric_limits<double>::infinity();
  const double lo = rates.upper > 0.0 ? 1.0 / rates.upper : inf;
  const double hi = rates.lower > 0.0 ? 1.0 / rates.lower : inf;
  return {lo, hi};
}

double no_jump_upper_prob(double delta, const RateInterval& rates) {
  if (!(delta >= 0.0)) throw ValidationError("delta must be >= 0");
  return std::exp(-delta * rates.lower);
}

double jump_count_tail_bound(double delta, long m, const RateInterval& rates) {
  if (m < 1) throw ValidationError("m must be >= 1");
  if (!(delta >= 0.0)) throw ValidationError("delta must be >= 0");
  return std::min(1.0, rates.upper * delta / static_cast<double>(m));
}

ExpectationResult conditional_markov(const LatticeFunction& g, long state, double delta,
                                     const RateInterval& rates, Mode mode,
                                     const SemigroupConfig& cfg) {
  if (state < 0 || state > g.n_max()) throw ValidationError("state beyond the lattice");
  // The absorbing extension is the payoff by definition, and a flat tail is
  // invariant under the evolution, so the lattice computation is exact up to
  // the Euler bound.
  SemigroupResult res = semigroup_apply(g, delta, rates, mode, cfg);
  ExpectationResult out;
  out.value = res.g.at(state);
  out.euler_bound = res.error_bound;
  out.error_bound = res.error_bound;
  out.mode = mode;
  return out;
}

}  // namespace ipp
