#include "ipp/sampling.hpp"

#include <cmath>
#include <random>

namespace ipp {

namespace {

// Uniform draw in (0, 1] from the top 53 bits; avoids exactly 0 so that
// -log(u) and zero-rate rejection stay well defined.
double unit_interval(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

SamplingPolicy constant_rate_policy(double lambda) {
  return SamplingPolicy{RateInterval(lambda, lambda),
                        [lambda](long, double) { return lambda; }};
}

CountingPath sample_path(const SamplingPolicy& policy, double horizon, std::uint64_t seed) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw ValidationError("horizon must be finite and nonnegative");
  }
  const double envelope = policy.rates.upper;
  std::vector<double> jumps;
  if (envelope > 0.0) {
    std::mt19937_64 rng(seed);
    long count = 0;
    double t = 0.0;
    for (;;) {
      t += -std::log(unit_interval(rng)) / envelope;
      if (t > horizon) break;
      const double r = policy.rate(count, t);
      if (!std::isfinite(r) || !policy.rates.contains(r)) {
        throw ValidationError("policy returned a rate outside the interval");
      }
      if (unit_interval(rng) * envelope <= r) {
        jumps.push_back(t);
        ++count;
      }
    }
  }
  return CountingPath(std::move(jumps), horizon);
}

std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
  // splitmix64 passes over the combined words
  std::uint64_t x = root + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
  for (int i = 0; i < 2; ++i) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    x = z ^ (z >> 31);
  }
  return x;
}

}  // namespace ipp
