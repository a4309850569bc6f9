#pragma once

// Shared generators for the test suites: random paths, bounded payoffs and
// elementary strategies with pathwise-increasing round boundaries.

#include <cmath>
#include <random>
#include <vector>

#include "ipp/finitary.hpp"
#include "ipp/path.hpp"
#include "ipp/sampling.hpp"
#include "ipp/stopping.hpp"
#include "ipp/trading.hpp"

namespace ipp::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

inline long uniform_int(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline CountingPath random_path(std::mt19937_64& rng, double rate, double horizon) {
  return sample_path(constant_rate_policy(rate), horizon, rng());
}

// Single-time payoff from a random dense table.
inline FinitaryVariable random_table_variable(std::mt19937_64& rng, double time,
                                              double magnitude, long entries) {
  std::vector<double> values(static_cast<std::size_t>(entries));
  for (double& v : values) v = uniform(rng, -magnitude, magnitude);
  return FinitaryVariable::table({time}, std::move(values));
}

// Bounded smooth payoff on k times: a constant plus one cosine per
// coordinate; the declared bound is the sum of magnitudes.
inline FinitaryVariable random_smooth_variable(std::mt19937_64& rng,
                                               std::vector<double> times,
                                               double magnitude) {
  const std::size_t k = times.size();
  std::vector<double> amp(k), freq(k), phase(k);
  double bound = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    amp[i] = uniform(rng, -magnitude, magnitude);
    freq[i] = uniform(rng, 0.2, 2.5);
    phase[i] = uniform(rng, 0.0, 6.28);
    bound += std::abs(amp[i]);
  }
  const double base = uniform(rng, -magnitude, magnitude);
  bound += std::abs(base);
  auto payoff = [amp, freq, phase, base](std::span<const long> z) {
    double v = base;
    for (std::size_t i = 0; i < amp.size(); ++i) {
      v += amp[i] * std::cos(freq[i] * static_cast<double>(z[i]) + phase[i]);
    }
    return v;
  };
  return FinitaryVariable::custom(std::move(times), payoff, bound);
}

inline StateFunction random_stake(std::mt19937_64& rng, double lo, double hi) {
  std::vector<double> values(static_cast<std::size_t>(uniform_int(rng, 1, 5)));
  for (double& v : values) v = uniform(rng, lo, hi);
  return StateFunction(std::move(values));
}

// Elementary strategy whose round boundaries are increasing pathwise: either
// sorted constants, increasing hit levels, or min/max of the two families
// with both parameter sequences increasing.
inline Strategy random_strategy(std::mt19937_64& rng, const RateInterval& rates,
                                double latest_time, Sided sided) {
  const long n = uniform_int(rng, 1, 4);
  const int family = static_cast<int>(uniform_int(rng, 0, 3));

  std::vector<double> times(static_cast<std::size_t>(n) + 1);
  for (double& t : times) t = uniform(rng, 0.05, latest_time);
  std::sort(times.begin(), times.end());
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] <= times[i - 1]) times[i] = times[i - 1] + 0.01;
  }
  std::vector<long> levels(static_cast<std::size_t>(n) + 1);
  long level = uniform_int(rng, 1, 2);
  for (long& m : levels) {
    m = level;
    level += uniform_int(rng, 1, 2);
  }

  auto boundary = [&](std::size_t i) {
    switch (family) {
      case 0: return StoppingTime::constant(times[i]);
      case 1: return StoppingTime::hit_level(levels[i]);
      case 2:
        return StoppingTime::max_of(StoppingTime::constant(times[i]),
                                    StoppingTime::hit_level(levels[i]));
      default:
        return StoppingTime::min_of(StoppingTime::constant(times[i]),
                                    StoppingTime::hit_level(levels[i]));
    }
  };

  std::vector<Round> rounds;
  for (long k = 0; k < n; ++k) {
    Round r{boundary(static_cast<std::size_t>(k)), StateFunction(), StateFunction()};
    if (sided == Sided::one) {
      r.stake_up = random_stake(rng, 0.0, 1.5);
      r.stake_down = random_stake(rng, 0.0, 1.5);
    } else {
      r.stake_up = random_stake(rng, -1.5, 1.5);
    }
    rounds.push_back(std::move(r));
  }
  return Strategy(sided, rates, std::move(rounds), boundary(static_cast<std::size_t>(n)));
}

}  // namespace ipp::testing
