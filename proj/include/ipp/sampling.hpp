#pragma once

#include <cstdint>
#include <functional>

#include "ipp/path.hpp"

namespace ipp {

// A rate control for the simulator: maps (current count, current time) to an
// intensity that must stay inside `rates`. The thinning envelope is
// rates.upper.
struct SamplingPolicy {
  RateInterval rates;
  std::function<double(long count, double time)> rate;
};

SamplingPolicy constant_rate_policy(double lambda);

// Simulates a counting path on [0, horizon] by thinning a rate-upper Poisson
// stream: candidate jumps arrive at rate rates.upper and each is accepted
// with probability rate(count, time)/rates.upper. Deterministic given seed.
// Throws ValidationError if the policy ever returns a rate outside `rates`.
CountingPath sample_path(const SamplingPolicy& policy, double horizon, std::uint64_t seed);

// Small deterministic seed-stream helper so batch workloads can derive
// independent per-item seeds from one root seed.
std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0);

}  // namespace ipp
