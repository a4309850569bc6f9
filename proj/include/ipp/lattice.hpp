#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ipp/errors.hpp"
#include "ipp/path.hpp"

namespace ipp {

enum class Mode { upper, lower };

// A bounded real function on the truncated state lattice {0, ..., n_max}
// with an absorbing boundary: values past n_max repeat the last entry.
class LatticeFunction {
 public:
  explicit LatticeFunction(std::vector<double> values);
  LatticeFunction(long n_max, const std::function<double(long)>& fn);

  long n_max() const { return static_cast<long>(values_.size()) - 1; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  // Value at state n, absorbing past n_max.
  double at(long n) const {
    const long top = n_max();
    return values_[static_cast<std::size_t>(n < top ? n : top)];
  }

  double span() const;  // max - min over the lattice
  double max_abs() const;

  // Same values re-tabulated on {0, ..., new_n_max}, absorbing extension.
  LatticeFunction resized(long new_n_max) const;

 private:
  std::vector<double> values_;
};

// Discretization control for the Euler operator exponential and the state
// truncation policy. theta caps the per-step intensity mass so each Euler
// factor stays a monotone map; tol is the absolute-error budget for one
// semigroup application.
struct SemigroupConfig {
  double theta = 0.1;    // per-step intensity mass cap, in (0, 1]
  double tol = 1e-6;     // Euler absolute-error budget per application
  // Lattice sizing: n_max = start + max(ceil(mass) + ceil(sigma*sqrt(mass))
  // + margin, ceil(mass/trunc_rel)) where mass = upper_rate * duration. The
  // recorded truncation budget is span * min(1, mass / (n_max - start));
  // trunc_rel caps mass/(n_max-start).
  double trunc_rel = 0.1;
  double lattice_sigma = 6.0;
  long lattice_margin = 16;
  long n_max_ceiling = 200000;       // abort above this lattice size
  std::int64_t max_steps = 400000000;  // abort above this Euler step count

  void validate() const;

  // States needed above `start` for total intensity mass `mass`; throws
  // ResourceError when the ceiling cannot accommodate it.
  long lattice_size(long start, double mass) const;
};

// The paper-backed tail weight min(1, mass / m) of seeing at least m more
// jumps, used to budget the truncation error of an absorbing lattice.
double lattice_truncation_budget(double span, double mass, long states_above_start);

}  // namespace ipp
