#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ipp/finitary.hpp"
#include "ipp/lattice.hpp"
#include "ipp/path.hpp"
#include "ipp/stopping.hpp"

namespace ipp {

// A stake as a function of the count observed when the round opens: a dense
// table over states with absorbing extension (counts past the end take the
// last entry). An empty table is identically zero; a constant is a
// one-entry table.
class StateFunction {
 public:
  StateFunction() = default;
  explicit StateFunction(std::vector<double> values) : values_(std::move(values)) {}
  static StateFunction constant(double c) { return StateFunction({c}); }

  double at(long n) const {
    if (values_.empty()) return 0.0;
    const long top = static_cast<long>(values_.size()) - 1;
    return values_[static_cast<std::size_t>(n < top ? n : top)];
  }
  const std::vector<double>& values() const { return values_; }
  bool nonnegative() const;
  double max_abs() const;

 private:
  std::vector<double> values_;
};

enum class Sided { one, two };

// One betting round: opens at `open`, closes when the next round opens (the
// strategy-level `close` time for the last round). One-sided rounds carry a
// nonnegative pair (stake_up against the upper rate, stake_down against the
// lower rate); two-sided rounds carry a single signed stake in stake_up and
// require a degenerate rate interval.
struct Round {
  StoppingTime open;
  StateFunction stake_up;
  StateFunction stake_down;
};

class Strategy {
 public:
  // Validates: one-sided stakes nonnegative; two-sided requires
  // rates.degenerate(); stake magnitudes within stake_bound (defaulted to
  // the largest table magnitude when not given).
  Strategy(Sided sided, RateInterval rates, std::vector<Round> rounds, StoppingTime close,
           std::optional<double> stake_bound = std::nullopt);

  Sided sided() const { return sided_; }
  const RateInterval& rates() const { return rates_; }
  const std::vector<Round>& rounds() const { return rounds_; }
  const StoppingTime& close() const { return close_; }
  double stake_bound() const { return stake_bound_; }

  // Opening time of round k (0-based) and of the slot after the last round.
  const StoppingTime& open_of(std::size_t k) const {
    return k < rounds_.size() ? rounds_[k].open : close_;
  }

  Strategy scaled(double mu) const;  // mu > 0: scales every stake

 private:
  Sided sided_;
  RateInterval rates_;
  std::vector<Round> rounds_;
  StoppingTime close_;
  double stake_bound_;
};

// Initial capital plus one or more strategies; the capital process is the
// initial capital plus the sum of every round's compensated-increment term.
// Several strategies back the cone operations: adding ledgers concatenates
// strategy lists, scaling scales stakes and initial capital.
struct CapitalLedger {
  double initial = 0.0;
  std::vector<Strategy> strategies;

  CapitalLedger() = default;
  CapitalLedger(double c, Strategy s) : initial(c) { strategies.push_back(std::move(s)); }
  CapitalLedger(double c, std::vector<Strategy> s) : initial(c), strategies(std::move(s)) {}

  const Strategy& single() const;  // requires exactly one strategy
};

CapitalLedger merge(const CapitalLedger& a, const CapitalLedger& b);
CapitalLedger scale(const CapitalLedger& ledger, double mu);

// Merges two strategies whose round boundaries are all constant times and
// whose stakes are constants, into a single strategy over the refined time
// grid whose capital process is exactly the sum of the two.
Strategy interleave_constant_strategies(const Strategy& a, const Strategy& b);

// Trader's wealth at time t on the given path: initial capital plus, per
// round k with boundaries tau_k, tau_{k+1},
//   up * (N_{tau_{k+1}^t} - N_{tau_k^t} - upper * (tau_{k+1}^t - tau_k^t))
// + down * (lower * (tau_{k+1}^t - tau_k^t) - N_{tau_{k+1}^t} + N_{tau_k^t})
// with a^t short for min(a, t) and stakes evaluated at the count when the
// round opened. Two-sided rounds use the single compensated term. Requires
// t <= path.horizon and pathwise-increasing round boundaries.
double capital_process_eval(const CapitalLedger& ledger, const CountingPath& path, double t);

// Within one round the capital change over [t, r] collapses to
//   (up - down) * (N_r - N_t - lower*(r - t)) - up * (upper - lower) * (r - t).
// Checks that identity to relative tolerance 1e-12; ledger must hold a
// single strategy and [t, r] must not straddle a round boundary.
bool increment_identity_check(const CapitalLedger& ledger, const CountingPath& path,
                              double t, double r);

// The grid superhedge for a single-coordinate payoff over [s, t]: ladder
// levels, stakes, grid stopping times min'd with the two-jump cell scan, and
// its initial capital.
struct Superhedge {
  Strategy strategy;
  double initial_capital = 0.0;
  double grid_start = 0.0;
  double grid_end = 0.0;
  long cells = 0;
  double delta_margin = 0.0;               // span(g) * lower * cell_width
  std::vector<std::vector<double>> ladder;  // cells+1 levels, top first
};

// Builds the strategy that superhedges g(N_t) from state `start_state` at
// time s with n grid cells: ladder levels (I + width*G)^j g, stakes read off
// consecutive ladder differences (positive part up, negative part down), and
// initial capital ladder_top(start_state) + margin. Requires s < t, n >= 1
// and n large enough that width * upper <= 1.
Superhedge synthesize_superhedge(const LatticeFunction& g, double s, double t, long n,
                                 const RateInterval& rates, long start_state = 0);

struct SuperhedgeReport {
  long total_paths = 0;
  long good_paths = 0;        // at most one jump per grid cell
  long complement_paths = 0;  // some cell saw two or more jumps
  long violations = 0;        // good paths where capital < payoff - tol
  double worst_margin = 0.0;  // min over good paths of capital - payoff
  double complement_frequency = 0.0;
  double min_capital_on_complement = 0.0;
  bool passed(double tol) const { return violations == 0 && worst_margin >= -tol; }
};

// Partitions paths by the one-jump-per-cell event and checks the hedge
// covers the payoff at the grid end on the good set.
SuperhedgeReport superhedge_verify(const Superhedge& hedge, const FinitaryVariable& var,
                                   const std::vector<CountingPath>& paths, double tol = 1e-9);

// Constructively falsifies any guaranteed profit: returns a path agreeing
// with omega on [0, t] whose settlement capital stays below
// capital(omega, t) + epsilon. Per active round the continuation either
// stops jumping (nonnegative net stake) or jumps on the schedule that keeps
// the count within one of lower*(elapsed) (negative net stake), with the
// epsilon budget split across rounds. Requires a single-strategy ledger and
// epsilon > 0.
struct FalsifierResult {
  CountingPath path;
  double settlement_time = 0.0;
  double capital_at_cut = 0.0;
  double settlement_capital = 0.0;
};
FalsifierResult coherence_falsify(const CapitalLedger& ledger, double t,
                                  const CountingPath& omega, double epsilon);

std::string strategy_to_json(const CapitalLedger& ledger);
CapitalLedger strategy_from_json(const std::string& text);
std::string superhedge_to_json(const Superhedge& hedge);

}  // namespace ipp
