#include "ipp/finitary.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "json.hpp"

namespace ipp {

namespace {

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw ValidationError("finitary variable needs at least one time");
  double prev = -1.0;
  for (double t : times) {
    if (!std::isfinite(t) || t < 0.0) throw ValidationError("times must be finite and >= 0");
    if (!(t > prev)) throw ValidationError("times must be strictly increasing");
    prev = t;
  }
}

double table_lookup(const std::vector<double>& values, long n) {
  const long top = static_cast<long>(values.size()) - 1;
  return values[static_cast<std::size_t>(n < top ? n : top)];
}

}  // namespace

FinitaryVariable::FinitaryVariable(std::vector<double> times, Kind kind,
                                   std::function<double(std::span<const long>)> payoff,
                                   double bound)
    : times_(std::move(times)), kind_(kind), payoff_(std::move(payoff)), bound_(bound) {
  check_times(times_);
  if (!(bound_ >= 0.0) || !std::isfinite(bound_)) {
    throw ValidationError("declared bound must be finite and >= 0");
  }
}

FinitaryVariable FinitaryVariable::table(std::vector<double> times, std::vector<double> values) {
  if (times.size() != 1) throw ValidationError("table payoffs are single-time");
  if (values.empty()) throw ValidationError("payoff table is empty");
  double bound = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("payoff table has non-finite entries");
    bound = std::max(bound, std::abs(v));
  }
  auto shared = std::make_shared<std::vector<double>>(std::move(values));
  FinitaryVariable var(std::move(times), Kind::table,
                       [shared](std::span<const long> z) { return table_lookup(*shared, z[0]); },
                       bound);
  var.table_values_ = *shared;
  return var;
}

FinitaryVariable FinitaryVariable::indicator(std::vector<double> times, std::vector<long> target) {
  if (times.size() != target.size()) throw ValidationError("indicator target arity mismatch");
  for (long z : target) {
    if (z < 0) throw ValidationError("indicator target counts must be >= 0");
  }
  auto shared = std::make_shared<std::vector<long>>(std::move(target));
  FinitaryVariable var(std::move(times), Kind::indicator,
                       [shared](std::span<const long> z) {
                         return std::equal(z.begin(), z.end(), shared->begin()) ? 1.0 : 0.0;
                       },
                       1.0);
  var.target_ = *shared;
  return var;
}

FinitaryVariable FinitaryVariable::capped_count(std::vector<double> times, long cap) {
  if (cap < 0) throw ValidationError("cap must be >= 0");
  FinitaryVariable var(std::move(times), Kind::capped_count,
                       [cap](std::span<const long> z) {
                         return static_cast<double>(std::min(z.back(), cap));
                       },
                       static_cast<double>(cap));
  var.scalar_param_ = cap;
  return var;
}

FinitaryVariable FinitaryVariable::capped_increment(std::vector<double> times, long cap) {
  if (cap < 0) throw ValidationError("cap must be >= 0");
  FinitaryVariable var(std::move(times), Kind::capped_increment,
                       [cap](std::span<const long> z) {
                         const long base = z.size() > 1 ? z.front() : 0;
                         return static_cast<double>(std::min(z.back() - base, cap));
                       },
                       static_cast<double>(cap));
  var.scalar_param_ = cap;
  return var;
}

FinitaryVariable FinitaryVariable::increment_equals(std::vector<double> times, long value) {
  if (value < 0) throw ValidationError("increment value must be >= 0");
  FinitaryVariable var(std::move(times), Kind::increment_equals,
                       [value](std::span<const long> z) {
                         const long prev = z.size() > 1 ? z[z.size() - 2] : 0;
                         return (z.back() - prev == value) ? 1.0 : 0.0;
                       },
                       1.0);
  var.scalar_param_ = value;
  return var;
}

FinitaryVariable FinitaryVariable::custom(std::vector<double> times,
                                          std::function<double(std::span<const long>)> payoff,
                                          double bound) {
  return FinitaryVariable(std::move(times), Kind::custom, std::move(payoff), bound);
}

double FinitaryVariable::payoff(std::span<const long> counts) const {
  if (counts.size() != times_.size()) throw ValidationError("payoff arity mismatch");
  return payoff_(counts);
}

double FinitaryVariable::eval(const CountingPath& path) const {
  if (times_.back() > path.horizon()) throw ValidationError("variable time beyond path horizon");
  std::vector<long> counts(times_.size());
  for (std::size_t i = 0; i < times_.size(); ++i) counts[i] = path.eval(times_[i]);
  return payoff_(counts);
}

void FinitaryVariable::spot_check_bound(long n_max) const {
  // Walk monotone tuples along a few rays plus a small dense sweep of the
  // last coordinate; enough to catch a mis-declared bound on lattice states.
  std::vector<long> z(times_.size(), 0);
  auto probe = [&](std::span<const long> tuple) {
    const double v = payoff_(tuple);
    if (!(std::abs(v) <= bound_ + 1e-12)) {
      throw ValidationError("payoff exceeds its declared bound on the lattice");
    }
  };
  for (long base = 0; base <= n_max; ++base) {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::min(base + static_cast<long>(i), n_max);
    probe(z);
    for (long last = base; last <= n_max; last += std::max<long>(1, n_max / 8)) {
      z.back() = last;
      probe(z);
    }
  }
}

std::string FinitaryVariable::to_json() const {
  nlohmann::json payoff;
  switch (kind_) {
    case Kind::table:
      payoff = {{"kind", "table"}, {"values", table_values_}};
      break;
    case Kind::indicator:
      payoff = {{"kind", "indicator"}, {"target", target_}};
      break;
    case Kind::capped_count:
      payoff = {{"kind", "capped_count"}, {"cap", scalar_param_}};
      break;
    case Kind::capped_increment:
      payoff = {{"kind", "capped_increment"}, {"cap", scalar_param_}};
      break;
    case Kind::increment_equals:
      payoff = {{"kind", "increment_equals"}, {"value", scalar_param_}};
      break;
    case Kind::custom:
      throw ValidationError("custom payoffs do not serialize");
  }
  nlohmann::json j;
  j["times"] = times_;
  j["payoff"] = payoff;
  return j.dump();
}

FinitaryVariable FinitaryVariable::from_json(const std::string& text) {
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("times") || !j.contains("payoff")) {
      throw ValidationError("variable JSON needs \"times\" and \"payoff\"");
    }
    auto times = j["times"].get<std::vector<double>>();
    const auto& p = j["payoff"];
    const std::string kind = p.at("kind").get<std::string>();
    if (kind == "table") return table(std::move(times), p.at("values").get<std::vector<double>>());
    if (kind == "indicator") return indicator(std::move(times), p.at("target").get<std::vector<long>>());
    if (kind == "capped_count") return capped_count(std::move(times), p.at("cap").get<long>());
    if (kind == "capped_increment") return capped_increment(std::move(times), p.at("cap").get<long>());
    if (kind == "increment_equals") return increment_equals(std::move(times), p.at("value").get<long>());
    throw ValidationError("unknown payoff kind: " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad variable JSON: ") + e.what());
  }
}

FinitaryVariable FinitaryVariable::sum(const FinitaryVariable& f, const FinitaryVariable& g) {
  if (f.times_ != g.times_) throw ValidationError("sum needs a shared time grid");
  auto pf = f.payoff_;
  auto pg = g.payoff_;
  return custom(f.times_, [pf, pg](std::span<const long> z) { return pf(z) + pg(z); },
                f.bound_ + g.bound_);
}

FinitaryVariable FinitaryVariable::scaled(const FinitaryVariable& f, double mu) {
  auto pf = f.payoff_;
  return custom(f.times_, [pf, mu](std::span<const long> z) { return mu * pf(z); },
                std::abs(mu) * f.bound_);
}

FinitaryVariable FinitaryVariable::shifted(const FinitaryVariable& f, double constant) {
  auto pf = f.payoff_;
  return custom(f.times_, [pf, constant](std::span<const long> z) { return pf(z) + constant; },
                f.bound_ + std::abs(constant));
}

FinitaryVariable FinitaryVariable::negated(const FinitaryVariable& f) { return scaled(f, -1.0); }

}  // namespace ipp
