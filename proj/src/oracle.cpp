#include "ipp/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "ipp/sampling.hpp"

namespace ipp {

namespace {

// Pmf table by the multiplicative recurrence, long enough that the dropped
// tail mass is below tail_share. Deliberately a different computation route
// from the log-space pmf used elsewhere.
std::vector<double> pmf_table(double mu, double tail_share) {
  std::vector<double> pmf;
  double p = std::exp(-mu);
  double mass = 0.0;
  long z = 0;
  while (mass < 1.0 - tail_share) {
    pmf.push_back(p);
    mass += p;
    ++z;
    p *= mu / static_cast<double>(z);
    if (z > 1000000) break;
  }
  return pmf;
}

}  // namespace

double precise_finitary_expectation(const FinitaryVariable& var, double lambda,
                                    double tail_tol) {
  if (!(lambda >= 0.0)) throw ValidationError("rate must be >= 0");
  if (!(tail_tol > 0.0)) throw ValidationError("tail_tol must be > 0");
  const auto& times = var.times();
  const std::size_t k = times.size();
  const double share = tail_tol / static_cast<double>(k);

  std::vector<std::vector<double>> tables(k);
  double prev = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    tables[j] = pmf_table(lambda * (times[j] - prev), share);
    prev = times[j];
  }

  // Forward enumeration over increment tuples; weights multiply across the
  // independent increments of the precise process.
  std::vector<long> counts(k, 0);
  double acc = 0.0;
  auto recurse = [&](auto&& self, std::size_t j, long base, double weight) -> void {
    if (j == k) {
      acc += weight * var.payoff(counts);
      return;
    }
    const auto& pmf = tables[j];
    for (std::size_t z = 0; z < pmf.size(); ++z) {
      counts[j] = base + static_cast<long>(z);
      self(self, j + 1, counts[j], weight * pmf[z]);
    }
  };
  recurse(recurse, 0, 0, 1.0);
  return acc;
}

double constant_rate_envelope(const FinitaryVariable& var, std::span<const double> grid,
                              Mode mode) {
  if (grid.empty()) throw ValidationError("envelope grid is empty");
  double best = precise_finitary_expectation(var, grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = precise_finitary_expectation(var, grid[i]);
    best = (mode == Mode::upper) ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

double RatePolicy::rate_at(std::size_t seg, const std::vector<long>& prefix, long state,
                           double u) const {
  if (seg >= segments_.size()) throw ValidationError("segment index out of range");
  const Segment& s = segments_[seg];
  std::vector<long> key = prefix;
  for (long& z : key) z = std::min(z, s.width - 1);
  auto it = s.choice.find(key);
  if (it == s.choice.end()) throw ValidationError("policy does not cover this prefix");
  const double step = (s.t_end - s.t_begin) / static_cast<double>(s.steps);
  long bucket = static_cast<long>(u / step);
  bucket = std::clamp<long>(bucket, 0, s.steps - 1);
  const long n = std::clamp<long>(state, 0, s.width - 1);
  return it->second[static_cast<std::size_t>(bucket * s.width + n)] ? rates_.upper : rates_.lower;
}

RatePolicy extract_policy(const FinitaryVariable& var, const RateInterval& rates, double h,
                          Mode mode, const SemigroupConfig& cfg) {
  if (!(h > 0.0) || h * rates.upper > 1.0) {
    throw ValidationError("need h > 0 with h * upper <= 1");
  }
  const auto& times = var.times();
  const std::size_t k = times.size();
  const long n_max = cfg.lattice_size(0, rates.upper * times.back());
  const long width = n_max + 1;

  std::vector<RatePolicy::Segment> segments(k);
  for (std::size_t j = 0; j < k; ++j) {
    segments[j].t_begin = j > 0 ? times[j - 1] : 0.0;
    segments[j].t_end = times[j];
    const double gap = segments[j].t_end - segments[j].t_begin;
    segments[j].steps = std::max<long>(1, static_cast<long>(std::ceil(gap / h)));
    segments[j].width = width;
  }

  // Backward recursion per segment with fixed step width, recording which
  // extreme rate attains the one-step max (upper mode) or min (lower mode);
  // ties go to the mode's own extreme.
  std::vector<long> prefix;
  auto evolve = [&](auto&& self, std::size_t j) -> std::vector<double> {
    std::vector<double> u(static_cast<std::size_t>(width));
    for (long n = 0; n < width; ++n) {
      prefix.push_back(n);
      if (j + 1 == k) {
        u[static_cast<std::size_t>(n)] = var.payoff(prefix);
      } else {
        u[static_cast<std::size_t>(n)] = self(self, j + 1)[static_cast<std::size_t>(n)];
      }
      prefix.pop_back();
    }
    RatePolicy::Segment& seg = segments[j];
    const double step = (seg.t_end - seg.t_begin) / static_cast<double>(seg.steps);
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(seg.steps) *
                                    static_cast<std::size_t>(width));
    for (long i = 0; i < seg.steps; ++i) {
      const long bucket = seg.steps - 1 - i;  // backward step governs this forward bucket
      for (long n = 0; n + 1 < width; ++n) {
        const double d = u[static_cast<std::size_t>(n + 1)] - u[static_cast<std::size_t>(n)];
        const bool take_upper = (mode == Mode::upper) ? (d >= 0.0) : (d < 0.0);
        flags[static_cast<std::size_t>(bucket * width + n)] = take_upper ? 1 : 0;
        u[static_cast<std::size_t>(n)] += step * (take_upper ? rates.upper : rates.lower) * d;
      }
      // boundary state: absorbing, no move; mark with the mode's tie rate
      flags[static_cast<std::size_t>(bucket * width + width - 1)] =
          (mode == Mode::upper) ? 1 : 0;
    }
    seg.choice.emplace(prefix, std::move(flags));
    return u;
  };
  evolve(evolve, 0);
  return RatePolicy(rates, std::move(segments));
}

SimulationResult policy_simulate(const FinitaryVariable& var, const RatePolicy& policy,
                                 long samples, std::uint64_t seed) {
  if (samples < 2) throw ValidationError("need at least 2 samples");
  if (policy.segments().size() != var.arity()) {
    throw ValidationError("policy does not match the variable's time grid");
  }
  const std::size_t k = var.arity();
  const RateInterval& rates = policy.rates();

  // Compensated accumulation keeps the reduction order-insensitive.
  double sum = 0.0, sum_c = 0.0, sq = 0.0, sq_c = 0.0;
  auto kahan = [](double& total, double& carry, double x) {
    const double y = x - carry;
    const double t = total + y;
    carry = (t - total) - y;
    total = t;
  };

  std::vector<long> counts(k, 0);
  std::vector<long> prefix;
  for (long i = 0; i < samples; ++i) {
    prefix.clear();
    long z = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const RatePolicy::Segment& seg = policy.segments()[j];
      // Resolve the prefix row once per segment; the closure then reads the
      // flag table directly on the hot path.
      std::vector<long> key = prefix;
      for (long& x : key) x = std::min(x, seg.width - 1);
      auto it = seg.choice.find(key);
      if (it == seg.choice.end()) throw ValidationError("policy does not cover this prefix");
      const std::vector<std::uint8_t>& flags = it->second;
      const double gap = seg.t_end - seg.t_begin;
      const double step = gap / static_cast<double>(seg.steps);
      const long base = z;
      SamplingPolicy sp{rates, [&, base](long local, double u) {
                          long bucket = static_cast<long>(u / step);
                          bucket = std::clamp<long>(bucket, 0, seg.steps - 1);
                          const long n = std::clamp<long>(base + local, 0, seg.width - 1);
                          return flags[static_cast<std::size_t>(bucket * seg.width + n)]
                                     ? rates.upper
                                     : rates.lower;
                        }};
      const CountingPath path = sample_path(sp, gap, mix_seed(seed, static_cast<std::uint64_t>(i), j));
      z += path.total_jumps();
      counts[j] = z;
      prefix.push_back(z);
    }
    const double v = var.payoff(counts);
    kahan(sum, sum_c, v);
    kahan(sq, sq_c, v * v);
  }

  SimulationResult out;
  out.samples = samples;
  out.mean = sum / static_cast<double>(samples);
  const double n = static_cast<double>(samples);
  const double variance = std::max(0.0, (sq - n * out.mean * out.mean) / (n - 1.0));
  out.ci_halfwidth = 2.5758293035489004 * std::sqrt(variance / n);  // 99% two-sided normal
  return out;
}

}  // namespace ipp
