#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ipp/path.hpp"

namespace ipp {

// A bounded payoff that depends on the path only through its counts at
// finitely many fixed times t_1 < ... < t_k. The payoff is a bounded real
// function on k-tuples of nonnegative integers with a declared bound B,
// |payoff| <= B. These are the objects the expectation engine prices.
class FinitaryVariable {
 public:
  // Serializable payoff kinds. `custom` carries an arbitrary evaluator and
  // is for in-process use only (generators in tests, mostly).
  enum class Kind { table, indicator, capped_count, capped_increment, increment_equals, custom };

  // k = 1 payoff read from a dense table; counts past the table end take the
  // last entry.
  static FinitaryVariable table(std::vector<double> times, std::vector<double> values);
  // 1 exactly on the given count tuple, 0 elsewhere.
  static FinitaryVariable indicator(std::vector<double> times, std::vector<long> target);
  // min(count at the last time, cap).
  static FinitaryVariable capped_count(std::vector<double> times, long cap);
  // min(count at last time - count at first time, cap); for k = 1 the first
  // count is taken as 0.
  static FinitaryVariable capped_increment(std::vector<double> times, long cap);
  // 1 when the increment over the last two times equals `value` (for k = 1,
  // when the count itself equals `value`).
  static FinitaryVariable increment_equals(std::vector<double> times, long value);
  static FinitaryVariable custom(std::vector<double> times,
                                 std::function<double(std::span<const long>)> payoff,
                                 double bound);

  const std::vector<double>& times() const { return times_; }
  std::size_t arity() const { return times_.size(); }
  double bound() const { return bound_; }
  Kind kind() const { return kind_; }

  double payoff(std::span<const long> counts) const;

  // Counts at t_1..t_k read from the path, fed to the payoff.
  // Requires times().back() <= path.horizon().
  double eval(const CountingPath& path) const;

  // Samples tuples with entries up to n_max and throws ValidationError if
  // the declared bound is violated anywhere in the sample.
  void spot_check_bound(long n_max) const;

  // {"times": [...], "payoff": {"kind": ..., ...}}; custom payoffs do not
  // serialize.
  std::string to_json() const;
  static FinitaryVariable from_json(const std::string& text);

  // Pointwise combinations on a shared time grid (payoffs become custom).
  static FinitaryVariable sum(const FinitaryVariable& f, const FinitaryVariable& g);
  static FinitaryVariable scaled(const FinitaryVariable& f, double mu);
  static FinitaryVariable shifted(const FinitaryVariable& f, double constant);
  static FinitaryVariable negated(const FinitaryVariable& f);

 private:
  FinitaryVariable(std::vector<double> times, Kind kind,
                   std::function<double(std::span<const long>)> payoff, double bound);

  std::vector<double> times_;
  Kind kind_;
  std::function<double(std::span<const long>)> payoff_;
  double bound_;

  // Parameters for serializable kinds.
  std::vector<double> table_values_;
  std::vector<long> target_;
  long scalar_param_ = 0;

  friend struct FinitaryAccess;
};

}  // namespace ipp
