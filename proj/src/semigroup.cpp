#include "ipp/semigroup.hpp"

#include <cmath>
#include <string>

namespace ipp {

double poisson_pmf(double mu, long z) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ValidationError("pmf parameter must be finite and >= 0");
  if (z < 0) return 0.0;
  if (mu == 0.0) return z == 0 ? 1.0 : 0.0;
  return std::exp(-mu + static_cast<double>(z) * std::log(mu) - std::lgamma(static_cast<double>(z) + 1.0));
}

LatticeFunction precise_generator_apply(const LatticeFunction& g, double lambda) {
  if (!(lambda >= 0.0)) throw ValidationError("rate must be >= 0");
  const auto& v = g.values();
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t n = 0; n + 1 < v.size(); ++n) {
    out[n] = lambda * (v[n + 1] - v[n]);
  }
  return LatticeFunction(std::move(out));  // absorbing boundary: zero at n_max
}

LatticeFunction generator_apply(const LatticeFunction& g, const RateInterval& rates, Mode mode) {
  const auto& v = g.values();
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t n = 0; n + 1 < v.size(); ++n) {
    const double d = v[n + 1] - v[n];
    const bool take_upper = (mode == Mode::upper) ? (d >= 0.0) : (d < 0.0);
    out[n] = (take_upper ? rates.upper : rates.lower) * d;
  }
  return LatticeFunction(std::move(out));
}

namespace {

// In-place Euler product (I + hG)^k in upper mode. Updating states in
// ascending order is exact: slot n is written after its old value and the
// still-old value of slot n+1 were read.
void euler_upper_inplace(std::vector<double>& v, double h, const RateInterval& rates,
                         std::int64_t steps) {
  const std::size_t top = v.size() - 1;
  for (std::int64_t i = 0; i < steps; ++i) {
    for (std::size_t n = 0; n < top; ++n) {
      const double d = v[n + 1] - v[n];
      v[n] += h * (d >= 0.0 ? rates.upper : rates.lower) * d;
    }
  }
}

}  // namespace

SemigroupResult semigroup_apply(const LatticeFunction& g, double delta, const RateInterval& rates,
                                Mode mode, const SemigroupConfig& cfg) {
  cfg.validate();
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be finite and >= 0");
  if (delta == 0.0) return SemigroupResult{g, 0.0, 0};
  if (mode == Mode::lower) {
    // Exact conjugate: same code path on -g, flipped back.
    std::vector<double> neg = g.values();
    for (double& x : neg) x = -x;
    SemigroupResult r = semigroup_apply(LatticeFunction(std::move(neg)), delta, rates,
                                        Mode::upper, cfg);
    for (double& x : r.g.mutable_values()) x = -x;
    return r;
  }

  const double span = g.span();
  const double two_lam = 2.0 * rates.upper;
  const double mono_steps = std::ceil(delta * rates.upper / cfg.theta);
  const double err_steps =
      cfg.tol > 0.0 ? std::ceil(delta * delta * two_lam * two_lam * span / (2.0 * cfg.tol)) : 1.0;
  const double k_needed = std::max({mono_steps, err_steps, 1.0});
  if (k_needed > static_cast<double>(cfg.max_steps)) {
    throw ResourceError("Euler exponential needs " +
                        std::to_string(static_cast<long long>(k_needed)) +
                        " steps, above the ceiling of " + std::to_string(cfg.max_steps));
  }
  const std::int64_t k = static_cast<std::int64_t>(k_needed);
  const double h = delta / static_cast<double>(k);

  std::vector<double> v = g.values();
  euler_upper_inplace(v, h, rates, k);

  SemigroupResult result{LatticeFunction(std::move(v)), 0.0, k};
  result.error_bound = delta * delta * two_lam * two_lam * span / (2.0 * static_cast<double>(k));
  return result;
}

SemigroupResult precise_semigroup_apply(const LatticeFunction& g, double delta, double lambda,
                                        double tail_tol) {
  if (!(delta >= 0.0) || !(lambda >= 0.0)) throw ValidationError("delta and lambda must be >= 0");
  if (!(tail_tol > 0.0)) throw ValidationError("tail_tol must be > 0");
  const double mu = lambda * delta;
  if (mu == 0.0) return SemigroupResult{g, 0.0, 0};

  // Walk the pmf by its recurrence until the remaining mass is below
  // tail_tol; park the leftover mass on the absorbing value.
  const long n_max = g.n_max();
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  double p = std::exp(-mu);
  double mass = 0.0;
  long z = 0;
  std::vector<double> pmf;
  while (mass < 1.0 - tail_tol) {
    pmf.push_back(p);
    mass += p;
    ++z;
    p *= mu / static_cast<double>(z);
    if (z > 1000000) break;  // unreachable at desk scale; guards mu overflow
  }
  const double leftover = std::max(0.0, 1.0 - mass);
  for (long n = 0; n <= n_max; ++n) {
    double acc = 0.0;
    for (long i = 0; i < static_cast<long>(pmf.size()); ++i) {
      acc += pmf[static_cast<std::size_t>(i)] * g.at(n + i);
    }
    acc += leftover * g.at(n_max);
    out[static_cast<std::size_t>(n)] = acc;
  }
  SemigroupResult result{LatticeFunction(std::move(out)), g.span() * leftover,
                         static_cast<std::int64_t>(pmf.size())};
  return result;
}

}  // namespace ipp
