#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ipp/finitary.hpp"
#include "ipp/stopping.hpp"
#include "test_support.hpp"

using namespace ipp;

TEST_CASE("beyond-horizon orders above every finite time") {
  const TimeOrBeyond b = TimeOrBeyond::beyond();
  const TimeOrBeyond t = TimeOrBeyond::at(1e9);
  CHECK(t < b);
  CHECK_FALSE(b < t);
  CHECK(b == TimeOrBeyond::beyond());
  CHECK(min_value(b, t) == t);
  CHECK(max_value(b, t) == b);
  CHECK(b.clamp(2.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(b.value(), ValidationError);
}

TEST_CASE("stopping time evaluation on the built-in family") {
  CountingPath path({0.3, 0.9}, 1.0);

  CHECK(StoppingTime::constant(0.5).eval(path) == TimeOrBeyond::at(0.5));
  CHECK(StoppingTime::constant(1.5).eval(path).is_beyond());

  CHECK(StoppingTime::hit_level(1).eval(path) == TimeOrBeyond::at(0.3));
  CHECK(StoppingTime::hit_level(2).eval(path) == TimeOrBeyond::at(0.9));
  CHECK(StoppingTime::hit_level(3).eval(path).is_beyond());

  StoppingTime next = StoppingTime::next_jump_after(StoppingTime::constant(0.5));
  CHECK(next.eval(path) == TimeOrBeyond::at(0.9));
  CHECK(StoppingTime::next_jump_after(StoppingTime::constant(0.9)).eval(path).is_beyond());
  CHECK(StoppingTime::next_jump_after(StoppingTime::constant(1.5)).eval(path).is_beyond());

  StoppingTime combo = StoppingTime::min_of(StoppingTime::hit_level(3),
                                            StoppingTime::constant(0.4));
  CHECK(combo.eval(path) == TimeOrBeyond::at(0.4));
  CHECK(StoppingTime::max_of(StoppingTime::hit_level(1), StoppingTime::constant(0.4)).eval(path) ==
        TimeOrBeyond::at(0.4));

  CHECK_THROWS_AS(StoppingTime::hit_level(0), ValidationError);
}

TEST_CASE("grid scan finds the first cell with two jumps") {
  // cells [0, .5], [.5, 1]: two jumps land in the second cell
  StoppingTime scan = StoppingTime::two_jump_cell_scan(0.0, 1.0, 2);
  CHECK(scan.eval(CountingPath({0.6, 0.7}, 1.0)) == TimeOrBeyond::at(0.7));
  CHECK(scan.eval(CountingPath({0.3, 0.7}, 1.0)).is_beyond());
  CHECK(scan.eval(CountingPath({0.1, 0.2, 0.8}, 1.0)) == TimeOrBeyond::at(0.2));
  CHECK(scan.eval(CountingPath(1.0)).is_beyond());
}

TEST_CASE("static time bounds prune unbounded members") {
  CHECK(StoppingTime::constant(2.0).static_time_bound() == 2.0);
  CHECK_FALSE(StoppingTime::hit_level(3).static_time_bound().has_value());
  CHECK(StoppingTime::min_of(StoppingTime::hit_level(3), StoppingTime::constant(1.5))
            .static_time_bound() == 1.5);
  CHECK_FALSE(StoppingTime::max_of(StoppingTime::hit_level(3), StoppingTime::constant(1.5))
                  .static_time_bound()
                  .has_value());
  CHECK(StoppingTime::two_jump_cell_scan(0.0, 3.0, 4).static_time_bound() == 3.0);
}

TEST_CASE("measurability holds for the built-in family on stitched pairs") {
  std::mt19937_64 rng(23);
  std::vector<std::pair<CountingPath, CountingPath>> pairs;
  for (int i = 0; i < 1000; ++i) {
    CountingPath a = testing::random_path(rng, 1.8, 2.0);
    const double cut = testing::uniform(rng, 0.0, 2.0);
    CountingPath b = stitch(a, cut, testing::random_path(rng, 1.8, 2.0 - cut));
    pairs.emplace_back(std::move(a), std::move(b));
  }
  for (const StoppingTime& tau :
       {StoppingTime::constant(0.7), StoppingTime::hit_level(2),
        StoppingTime::next_jump_after(StoppingTime::constant(0.4)),
        StoppingTime::min_of(StoppingTime::hit_level(1), StoppingTime::constant(1.2)),
        StoppingTime::max_of(StoppingTime::hit_level(1), StoppingTime::constant(0.3)),
        StoppingTime::two_jump_cell_scan(0.0, 2.0, 8)}) {
    MeasurabilityReport report = measurability_check(tau, pairs);
    CHECK(report.passed());
    CHECK(report.pairs_checked == 1000);
    CHECK(report.pairs_applicable > 0);
  }
}

TEST_CASE("a peek-ahead fixture is caught by the measurability check") {
  // Deliberately broken: looks 0.1 ahead of its own value.
  PathFunctional peek = [](const CountingPath& p) {
    if (p.jump_times().empty()) return TimeOrBeyond::beyond();
    return TimeOrBeyond::at(std::max(0.0, p.jump_times().front() - 0.1));
  };
  CountingPath a({0.5}, 2.0);
  CountingPath b({0.7}, 2.0);  // agrees with a on [0, 0.4]
  MeasurabilityReport report = measurability_check(peek, {{a, b}});
  CHECK_FALSE(report.passed());
  CHECK(report.violation_indices == std::vector<std::size_t>{0});
}

TEST_CASE("pairs must share a horizon") {
  std::vector<std::pair<CountingPath, CountingPath>> pairs{
      {CountingPath(1.0), CountingPath(2.0)}};
  CHECK_THROWS_AS(measurability_check(StoppingTime::constant(0.5), pairs), ValidationError);
}

TEST_CASE("hit level reaches its level whenever finite") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 300; ++i) {
    CountingPath path = testing::random_path(rng, 2.2, 1.5);
    for (long m = 1; m <= 3; ++m) {
      TimeOrBeyond v = StoppingTime::hit_level(m).eval(path);
      if (v.is_finite()) CHECK(path.eval(v.value()) >= m);
    }
  }
}

TEST_CASE("finitary evaluation reads counts at the variable's times") {
  FinitaryVariable constant = FinitaryVariable::custom(
      {0.5}, [](std::span<const long>) { return 3.25; }, 3.25);
  CHECK(constant.eval(CountingPath({0.1, 0.2}, 1.0)) == doctest::Approx(3.25));

  FinitaryVariable no_jump = FinitaryVariable::indicator({1.0}, {0});
  CHECK(no_jump.eval(CountingPath(1.0)) == doctest::Approx(1.0));
  CHECK(no_jump.eval(CountingPath({0.4}, 1.0)) == doctest::Approx(0.0));

  FinitaryVariable increment = FinitaryVariable::custom(
      {0.25, 0.75}, [](std::span<const long> z) { return static_cast<double>(z[1] - z[0]); },
      100.0);
  CHECK(increment.eval(CountingPath({0.5}, 1.0)) == doctest::Approx(1.0));

  CHECK_THROWS_AS(no_jump.eval(CountingPath(0.5)), ValidationError);
}

TEST_CASE("finitary payoffs by kind") {
  FinitaryVariable table = FinitaryVariable::table({1.0}, {5.0, -1.0, 2.0});
  long z0[] = {0}, z1[] = {1}, z9[] = {9};
  CHECK(table.payoff(z0) == doctest::Approx(5.0));
  CHECK(table.payoff(z1) == doctest::Approx(-1.0));
  CHECK(table.payoff(z9) == doctest::Approx(2.0));  // absorbing extension
  CHECK(table.bound() == doctest::Approx(5.0));

  FinitaryVariable capped = FinitaryVariable::capped_count({0.5, 1.0}, 3);
  long pair_a[] = {1, 2}, pair_b[] = {1, 7};
  CHECK(capped.payoff(pair_a) == doctest::Approx(2.0));
  CHECK(capped.payoff(pair_b) == doctest::Approx(3.0));

  FinitaryVariable inc = FinitaryVariable::capped_increment({0.5, 1.0}, 10);
  CHECK(inc.payoff(pair_b) == doctest::Approx(6.0));

  FinitaryVariable same = FinitaryVariable::increment_equals({0.5, 1.5}, 0);
  long eq[] = {2, 2}, neq[] = {2, 3};
  CHECK(same.payoff(eq) == doctest::Approx(1.0));
  CHECK(same.payoff(neq) == doctest::Approx(0.0));

  CHECK_THROWS_AS(FinitaryVariable::table({0.5, 1.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(FinitaryVariable::indicator({0.5}, {0, 0}), ValidationError);
  CHECK_THROWS_AS(FinitaryVariable::table({1.0, 0.5}, {1.0}), ValidationError);
}

TEST_CASE("declared bounds are spot checked") {
  FinitaryVariable lying = FinitaryVariable::custom(
      {1.0}, [](std::span<const long> z) { return static_cast<double>(z[0]); }, 2.0);
  CHECK_THROWS_AS(lying.spot_check_bound(30), ValidationError);
  FinitaryVariable honest = FinitaryVariable::capped_count({1.0}, 5);
  CHECK_NOTHROW(honest.spot_check_bound(30));
}

TEST_CASE("finitary value ignores the path after its last time") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    CountingPath path = testing::random_path(rng, 2.0, 2.0);
    FinitaryVariable var = testing::random_smooth_variable(rng, {0.4, 1.1}, 1.0);
    CountingPath rewired = stitch(path, 1.1, testing::random_path(rng, 2.0, 0.9));
    CHECK(var.eval(path) == doctest::Approx(var.eval(rewired)));
  }
}

TEST_CASE("serialization round trips") {
  for (const FinitaryVariable& var :
       {FinitaryVariable::table({1.0}, {0.0, 1.0, 0.5}),
        FinitaryVariable::indicator({0.5, 1.5}, {0, 2}),
        FinitaryVariable::capped_count({1.0}, 30),
        FinitaryVariable::capped_increment({0.5, 1.0}, 4),
        FinitaryVariable::increment_equals({0.5, 1.5}, 0)}) {
    FinitaryVariable back = FinitaryVariable::from_json(var.to_json());
    CHECK(back.times() == var.times());
    CHECK(back.kind() == var.kind());
    long probe[] = {1, 2};
    long single[] = {1};
    if (var.arity() == 2) {
      CHECK(back.payoff(probe) == doctest::Approx(var.payoff(probe)));
    } else {
      CHECK(back.payoff(single) == doctest::Approx(var.payoff(single)));
    }
  }
  FinitaryVariable custom = FinitaryVariable::custom(
      {1.0}, [](std::span<const long>) { return 0.0; }, 0.0);
  CHECK_THROWS_AS(custom.to_json(), ValidationError);

  StoppingTime tau = StoppingTime::min_of(
      StoppingTime::max_of(StoppingTime::constant(0.5), StoppingTime::hit_level(2)),
      StoppingTime::next_jump_after(StoppingTime::two_jump_cell_scan(0.0, 1.0, 4)));
  StoppingTime back = StoppingTime::from_json(tau.to_json());
  CountingPath probe({0.2, 0.4, 0.45, 0.8}, 1.0);
  CHECK(back.eval(probe) == tau.eval(probe));
}
