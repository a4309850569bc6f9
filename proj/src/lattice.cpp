#include "ipp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ipp {

LatticeFunction::LatticeFunction(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("lattice function needs at least one state");
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("lattice values must be finite");
  }
}

LatticeFunction::LatticeFunction(long n_max, const std::function<double(long)>& fn) {
  if (n_max < 0) throw ValidationError("n_max must be >= 0");
  values_.resize(static_cast<std::size_t>(n_max) + 1);
  for (long n = 0; n <= n_max; ++n) {
    const double v = fn(n);
    if (!std::isfinite(v)) throw ValidationError("lattice values must be finite");
    values_[static_cast<std::size_t>(n)] = v;
  }
}

double LatticeFunction::span() const {
  auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  return *hi - *lo;
}

double LatticeFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

LatticeFunction LatticeFunction::resized(long new_n_max) const {
  std::vector<double> out(static_cast<std::size_t>(new_n_max) + 1);
  for (long n = 0; n <= new_n_max; ++n) out[static_cast<std::size_t>(n)] = at(n);
  return LatticeFunction(std::move(out));
}

void SemigroupConfig::validate() const {
  if (!(theta > 0.0) || theta > 1.0) throw ValidationError("theta must be in (0, 1]");
  if (!(tol >= 0.0)) throw ValidationError("tol must be >= 0");
  if (!(trunc_rel > 0.0)) throw ValidationError("trunc_rel must be > 0");
  if (lattice_margin < 0 || !(lattice_sigma >= 0.0)) {
    throw ValidationError("lattice policy parameters must be >= 0");
  }
  if (n_max_ceiling < 1 || max_steps < 1) {
    throw ValidationError("ceilings must be >= 1");
  }
}

long SemigroupConfig::lattice_size(long start, double mass) const {
  validate();
  if (start < 0 || !(mass >= 0.0)) throw ValidationError("lattice sizing needs start >= 0, mass >= 0");
  const double buffer = std::ceil(mass) + std::ceil(lattice_sigma * std::sqrt(mass)) +
                        static_cast<double>(lattice_margin);
  const double tail = std::ceil(mass / trunc_rel);
  const double above = std::max(buffer, tail);
  const double n_max = static_cast<double>(start) + above;
  if (n_max > static_cast<double>(n_max_ceiling)) {
    throw ResourceError("lattice of " + std::to_string(static_cast<long long>(n_max)) +
                        " states exceeds the ceiling of " + std::to_string(n_max_ceiling));
  }
  return start + static_cast<long>(above);
}

double lattice_truncation_budget(double span, double mass, long states_above_start) {
  if (states_above_start < 1) return span;
  return span * std::min(1.0, mass / static_cast<double>(states_above_start));
}

}  // namespace ipp
