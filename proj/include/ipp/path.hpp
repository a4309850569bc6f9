#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ipp/errors.hpp"

namespace ipp {

// Per-unit-time intensity bounds put forth by the forecaster.
// lower == upper recovers the precise process.
struct RateInterval {
  double lower = 0.0;
  double upper = 0.0;

  RateInterval() = default;
  RateInterval(double lo, double hi);

  bool degenerate() const { return lower == upper; }
  bool contains(double rate) const { return lower <= rate && rate <= upper; }
  // True when [lower, upper] sits inside [outer.lower, outer.upper].
  bool nested_in(const RateInterval& outer) const {
    return outer.lower <= lower && upper <= outer.upper;
  }
};

// One realization of a counting process on [0, horizon]: a strictly
// increasing, finite list of jump times. The path value at t is the number
// of jumps <= t, so it starts at 0, has unit jumps and is right-continuous.
// Times beyond the horizon are undefined for this realization and querying
// them is a hard error. Immutable after construction.
class CountingPath {
 public:
  // Throws ValidationError unless jump times are strictly increasing,
  // strictly positive (a jump at 0 would contradict value 0 at time 0)
  // and all <= horizon.
  CountingPath(std::vector<double> jump_times, double horizon);

  // Empty path (no jumps) over [0, horizon].
  explicit CountingPath(double horizon) : CountingPath({}, horizon) {}

  // Count of jumps <= t. Throws ValidationError if t is outside [0, horizon].
  long eval(double t) const;

  const std::vector<double>& jump_times() const { return jumps_; }
  double horizon() const { return horizon_; }
  long total_jumps() const { return static_cast<long>(jumps_.size()); }

  // Same jumps, horizon extended to new_horizon (>= current horizon).
  CountingPath with_horizon(double new_horizon) const;

  bool operator==(const CountingPath& other) const {
    return horizon_ == other.horizon_ && jumps_ == other.jumps_;
  }

 private:
  std::vector<double> jumps_;
  double horizon_ = 0.0;
};

// Path followed up to tau, then varpi translated to start at tau. A jump of
// omega at exactly tau stays on the omega side. Result horizon is
// tau + varpi.horizon. Requires 0 <= tau <= omega.horizon.
CountingPath stitch(const CountingPath& omega, double tau, const CountingPath& varpi);

// The increments of omega from s onwards: jump times {r - s : r > s},
// horizon shrunk by s. Satisfies shift(w,s).eval(t) == w.eval(t+s) - w.eval(s).
CountingPath shift(const CountingPath& omega, double s);

// True when the two paths have the same jumps on [0, u].
bool agree_up_to(const CountingPath& a, const CountingPath& b, double u);

// JSON object {"horizon": h, "jumps": [..]} as text, and its inverse.
std::string path_to_json(const CountingPath& path);
CountingPath path_from_json(const std::string& text);

// CSV with header "index,jump_time", one row per jump.
std::string path_to_csv(const CountingPath& path);

}  // namespace ipp
