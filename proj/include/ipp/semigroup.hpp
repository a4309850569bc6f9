#pragma once

#include <cstdint>

#include "ipp/lattice.hpp"

namespace ipp {

// e^{-mu} mu^z / z!, computed in log space for stability.
double poisson_pmf(double mu, long z);

// Generator of the precise rate-lambda Poisson semigroup on the truncated
// lattice: (Gg)(n) = lambda * (g(n+1) - g(n)), zero at n_max under the
// absorbing boundary.
LatticeFunction precise_generator_apply(const LatticeFunction& g, double lambda);

// Sublinear (upper) generator: per state the best of the two extreme rates,
// (Gg)(n) = max{ lambda * (g(n+1) - g(n)) : lambda in {lower, upper} };
// lower mode takes the min instead.
LatticeFunction generator_apply(const LatticeFunction& g, const RateInterval& rates, Mode mode);

struct SemigroupResult {
  LatticeFunction g;
  double error_bound = 0.0;  // a-priori Euler bound actually achieved
  std::int64_t steps = 0;
};

// Operator exponential e^{delta * G} g via the Euler product (I + hG)^k with
// h = delta/k. k is chosen so h * upper_rate <= cfg.theta (each factor is
// then a monotone map) and the first-order bound
// delta^2 (2*upper)^2 span(g) / (2k) <= cfg.tol. Lower mode is computed as
// the exact conjugate -upper(-g), same code path with flipped signs.
// Throws ResourceError (with the required k) past cfg.max_steps.
SemigroupResult semigroup_apply(const LatticeFunction& g, double delta,
                                const RateInterval& rates, Mode mode,
                                const SemigroupConfig& cfg = {});

// Exact precise-Poisson transition applied by pmf-weighted summation,
// (S_delta g)(n) = sum_z g(n+z) psi_{lambda*delta}(z), truncated once the
// remaining tail mass drops below tail_tol; the neglected mass is assigned
// to the absorbing value so the reported bound span(g)*tail is conservative.
// Independent of the Euler path; serves as the oracle for degenerate
// intervals.
SemigroupResult precise_semigroup_apply(const LatticeFunction& g, double delta,
                                        double lambda, double tail_tol = 1e-12);

}  // namespace ipp
