#pragma once

#include <utility>
#include <vector>

#include "ipp/finitary.hpp"
#include "ipp/lattice.hpp"
#include "ipp/semigroup.hpp"

namespace ipp {

// Observed (time, count) pairs the engine conditions on, possibly empty for
// the unconditional case. Times strictly increase, counts are nondecreasing
// and consistent with a path starting at 0.
struct ConditioningPrefix {
  std::vector<std::pair<double, long>> observed;

  ConditioningPrefix() = default;
  explicit ConditioningPrefix(std::vector<std::pair<double, long>> obs);

  bool empty() const { return observed.empty(); }
  std::size_t size() const { return observed.size(); }
};

struct ExpectationResult {
  double value = 0.0;
  double error_bound = 0.0;  // euler_bound + truncation_bound
  Mode mode = Mode::upper;
  double euler_bound = 0.0;
  double truncation_bound = 0.0;
};

// Conditional upper expectation of a bounded finitary variable given the
// observed counts at a prefix of its times, by backward induction: the last
// coordinate is integrated out with the sublinear semigroup over the last
// gap, evaluated at the conditioning state, and so on down to the last
// observed time (or to time 0 from state 0 when unconditional). Error
// bounds accumulate across layers; the lattice truncation budget is
// reported separately inside the result.
ExpectationResult upper_expectation_finitary(const FinitaryVariable& var,
                                             const RateInterval& rates,
                                             const ConditioningPrefix& prefix,
                                             const SemigroupConfig& cfg = {});

// Conjugate -upper(-payoff).
ExpectationResult lower_expectation_finitary(const FinitaryVariable& var,
                                             const RateInterval& rates,
                                             const ConditioningPrefix& prefix,
                                             const SemigroupConfig& cfg = {});

// Closed form (lower*(t-s), upper*(t-s)) for the conditional expectation
// bounds of the increment N_t - N_s. Requires s <= t.
std::pair<double, double> expected_increment_bounds(double s, double t,
                                                    const RateInterval& rates);

// Closed form (1/upper, 1/lower) for the expected waiting time until the
// next jump, with the convention 1/0 = +infinity.
std::pair<double, double> renewal_time_bounds(const RateInterval& rates);

// Upper probability e^{-delta * lower} of seeing no jump over a window of
// length delta.
double no_jump_upper_prob(double delta, const RateInterval& rates);

// Upper-probability bound min(1, upper*delta/m) of at least m jumps in a
// window of length delta.
double jump_count_tail_bound(double delta, long m, const RateInterval& rates);

// (S_delta g)(state): the value of a single-coordinate payoff a window
// delta ahead, conditional on currently sitting at `state` -- identical no
// matter how or at what stopping time the process got there. Requires
// state <= g.n_max().
ExpectationResult conditional_markov(const LatticeFunction& g, long state, double delta,
                                     const RateInterval& rates, Mode mode,
                                     const SemigroupConfig& cfg = {});

}  // namespace ipp
