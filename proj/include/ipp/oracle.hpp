#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ipp/expectation.hpp"
#include "ipp/finitary.hpp"

namespace ipp {

// Exact expectation of a finitary variable under the precise rate-lambda
// process, by forward convolution of independent Poisson increments. Shares
// nothing with the Euler semigroup: forward recursion over increment tuples
// with its own pmf recurrence and tail truncation.
double precise_finitary_expectation(const FinitaryVariable& var, double lambda,
                                    double tail_tol = 1e-12);

// Envelope over a grid of constant rates: max (upper mode) or min (lower) of
// the precise expectations. Every constant-rate value bounds the engine's
// upper value from below, giving one side of the validation bracket.
double constant_rate_envelope(const FinitaryVariable& var, std::span<const double> grid,
                              Mode mode);

// A bang-bang rate control extracted from the one-step recursion: per
// segment between variable times, per conditioning prefix, a table over
// (time bucket, state) of which extreme rate attains the max (upper mode) or
// min (lower mode). Ties go to the upper rate in upper mode and to the lower
// rate in lower mode.
class RatePolicy {
 public:
  struct Segment {
    double t_begin = 0.0;
    double t_end = 0.0;
    long steps = 0;
    long width = 0;  // states per bucket row (n_max + 1)
    // Key: counts observed at the variable times before this segment.
    // Value: steps * width flags, 1 = use upper rate.
    std::map<std::vector<long>, std::vector<std::uint8_t>> choice;
  };

  RatePolicy(RateInterval rates, std::vector<Segment> segments)
      : rates_(rates), segments_(std::move(segments)) {}

  const RateInterval& rates() const { return rates_; }
  const std::vector<Segment>& segments() const { return segments_; }

  // Rate during segment `seg` at local time u since the segment start, in
  // absolute state `state`, for the given observed prefix.
  double rate_at(std::size_t seg, const std::vector<long>& prefix, long state, double u) const;

 private:
  RateInterval rates_;
  std::vector<Segment> segments_;
};

// Runs the backward recursion with fixed step width <= h (requires
// h * upper <= 1) and records the per-bucket argmax rates for the variable.
RatePolicy extract_policy(const FinitaryVariable& var, const RateInterval& rates, double h,
                          Mode mode, const SemigroupConfig& cfg = {});

struct SimulationResult {
  double mean = 0.0;
  double ci_halfwidth = 0.0;  // 99% normal-approximation half-width
  long samples = 0;
};

// Monte-Carlo achievability check: simulates paths under the policy by
// thinning, segment by segment, evaluates the variable at the segment
// endpoints, and returns the sample mean with a 99% confidence half-width.
// Deterministic given seed. Requires samples >= 2.
SimulationResult policy_simulate(const FinitaryVariable& var, const RatePolicy& policy,
                                 long samples, std::uint64_t seed);

}  // namespace ipp
