#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ipp/path.hpp"

namespace ipp {

// A stopping-time value: either a finite time (<= the path horizon where it
// was produced) or the distinguished beyond-horizon sentinel, which orders
// above every finite time so min/max stay total. The sentinel stands for
// +infinity at desk scale; it never leaks into arithmetic.
class TimeOrBeyond {
 public:
  static TimeOrBeyond at(double t) { return TimeOrBeyond(t, false); }
  static TimeOrBeyond beyond() { return TimeOrBeyond(0.0, true); }

  bool is_beyond() const { return beyond_; }
  bool is_finite() const { return !beyond_; }
  // Finite value; throws if beyond-horizon.
  double value() const;
  // min(tau, t) as a plain time; beyond-horizon clamps to t.
  double clamp(double t) const { return beyond_ ? t : (time_ < t ? time_ : t); }

  friend bool operator<(const TimeOrBeyond& a, const TimeOrBeyond& b) {
    if (a.beyond_) return false;
    if (b.beyond_) return true;
    return a.time_ < b.time_;
  }
  friend bool operator==(const TimeOrBeyond& a, const TimeOrBeyond& b) {
    return a.beyond_ == b.beyond_ && (a.beyond_ || a.time_ == b.time_);
  }
  friend bool operator<=(const TimeOrBeyond& a, const TimeOrBeyond& b) {
    return a < b || a == b;
  }

 private:
  TimeOrBeyond(double t, bool beyond) : time_(t), beyond_(beyond) {}
  double time_;
  bool beyond_;
};

TimeOrBeyond min_value(TimeOrBeyond a, TimeOrBeyond b);
TimeOrBeyond max_value(TimeOrBeyond a, TimeOrBeyond b);

class StoppingTime;

// Per-path memo for stopping-time evaluation. Strategies whose rounds share
// sub-expressions (the grid two-jump scan in particular) evaluate each shared
// node once per path instead of once per round.
struct StopEvalCache {
  const CountingPath* path = nullptr;
  std::unordered_map<const void*, TimeOrBeyond> memo;
};

// A representable stopping time: a closed family built from constants,
// level hits, next-jump chaining, pointwise min/max, and the grid two-jump
// scan used by the superhedge construction. Measurability (the value is
// determined by the path up to that value) holds by construction for every
// member. Nodes are shared immutable values; copying is cheap.
class StoppingTime {
 public:
  // The constant time t.
  static StoppingTime constant(double t);
  // First time the count reaches level m (the m-th jump time), m >= 1.
  static StoppingTime hit_level(long m);
  // First jump strictly after the inner stopping time.
  static StoppingTime next_jump_after(StoppingTime inner);
  static StoppingTime min_of(StoppingTime a, StoppingTime b);
  static StoppingTime max_of(StoppingTime a, StoppingTime b);
  // First time any cell of the uniform grid over [s, t] with `cells` cells
  // sees its count rise two above the cell-start count. Beyond-horizon on
  // paths with at most one jump per cell.
  static StoppingTime two_jump_cell_scan(double s, double t, long cells);

  TimeOrBeyond eval(const CountingPath& path) const;
  TimeOrBeyond eval(const CountingPath& path, StopEvalCache& cache) const;

  // Largest value the stopping time can take over all paths, when one is
  // determined by the structure alone (constants, grid scans and their
  // min/max combinations); nullopt when unbounded (level hits, next-jump).
  std::optional<double> static_time_bound() const;

  std::string to_json() const;
  static StoppingTime from_json(const std::string& text);

  struct Node;
  const Node* node() const { return node_.get(); }

 private:
  explicit StoppingTime(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend struct StoppingTimeAccess;
};

// Outcome of checking the defining stopping-time property on concrete path
// pairs: whenever the two paths agree up to tau(first), tau must agree too.
struct MeasurabilityReport {
  long pairs_checked = 0;
  // Pairs where the agreement premise held, so the conclusion was tested.
  long pairs_applicable = 0;
  std::vector<std::size_t> violation_indices;
  bool passed() const { return violation_indices.empty(); }
};

using PathFunctional = std::function<TimeOrBeyond(const CountingPath&)>;

// Checks the defining property on each pair. Both paths of a pair must share
// a horizon. The functional overload exists so tests can probe deliberately
// broken, peek-ahead fixtures that are not members of the built-in family.
MeasurabilityReport measurability_check(
    const PathFunctional& tau,
    const std::vector<std::pair<CountingPath, CountingPath>>& pairs);
MeasurabilityReport measurability_check(
    const StoppingTime& tau,
    const std::vector<std::pair<CountingPath, CountingPath>>& pairs);

}  // namespace ipp
