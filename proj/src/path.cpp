#include "ipp/path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace ipp {

RateInterval::RateInterval(double lo, double hi) : lower(lo), upper(hi) {
  if (!(lo >= 0.0) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ValidationError("rate bounds must be finite and nonnegative");
  }
  if (lo > hi) throw ValidationError("lower exceeds upper");
}

CountingPath::CountingPath(std::vector<double> jump_times, double horizon)
    : jumps_(std::move(jump_times)), horizon_(horizon) {
  if (!(horizon_ >= 0.0) || !std::isfinite(horizon_)) {
    throw ValidationError("horizon must be finite and nonnegative");
  }
  double prev = 0.0;
  for (double t : jumps_) {
    if (!std::isfinite(t)) throw ValidationError("jump times must be finite");
    // Strictly increasing and strictly positive: unit jumps, zero at time 0.
    if (!(t > prev)) throw ValidationError("jump times must be strictly increasing and > 0");
    if (t > horizon_) throw ValidationError("jump time beyond horizon");
    prev = t;
  }
}

long CountingPath::eval(double t) const {
  if (!(t >= 0.0) || t > horizon_) {
    throw ValidationError("time outside [0, horizon]");
  }
  // Right-continuity: a jump at exactly t is counted.
  auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t);
  return static_cast<long>(it - jumps_.begin());
}

CountingPath CountingPath::with_horizon(double new_horizon) const {
  if (new_horizon < horizon_) throw ValidationError("with_horizon cannot shrink the horizon");
  return CountingPath(jumps_, new_horizon);
}

CountingPath stitch(const CountingPath& omega, double tau, const CountingPath& varpi) {
  if (!(tau >= 0.0) || tau > omega.horizon()) {
    throw ValidationError("stitch point outside [0, omega.horizon]");
  }
  std::vector<double> jumps;
  for (double r : omega.jump_times()) {
    if (r <= tau) jumps.push_back(r);  // a jump at exactly tau stays with omega
  }
  for (double r : varpi.jump_times()) {
    jumps.push_back(tau + r);
  }
  return CountingPath(std::move(jumps), tau + varpi.horizon());
}

CountingPath shift(const CountingPath& omega, double s) {
  if (!(s >= 0.0) || s > omega.horizon()) {
    throw ValidationError("shift origin outside [0, horizon]");
  }
  std::vector<double> jumps;
  for (double r : omega.jump_times()) {
    if (r > s) jumps.push_back(r - s);
  }
  return CountingPath(std::move(jumps), omega.horizon() - s);
}

bool agree_up_to(const CountingPath& a, const CountingPath& b, double u) {
  const auto& ja = a.jump_times();
  const auto& jb = b.jump_times();
  auto ea = std::upper_bound(ja.begin(), ja.end(), u);
  auto eb = std::upper_bound(jb.begin(), jb.end(), u);
  return (ea - ja.begin()) == (eb - jb.begin()) && std::equal(ja.begin(), ea, jb.begin());
}

std::string path_to_json(const CountingPath& path) {
  nlohmann::json j;
  j["horizon"] = path.horizon();
  j["jumps"] = path.jump_times();
  return j.dump();
}

CountingPath path_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad path JSON: ") + e.what());
  }
  if (!j.contains("horizon") || !j.contains("jumps")) {
    throw ValidationError("path JSON needs \"horizon\" and \"jumps\"");
  }
  return CountingPath(j["jumps"].get<std::vector<double>>(), j["horizon"].get<double>());
}

std::string path_to_csv(const CountingPath& path) {
  std::ostringstream out;
  out << "index,jump_time\n";
  const auto& jumps = path.jump_times();
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", jumps[i]);
    out << i << ',' << buf << '\n';
  }
  return out.str();
}

}  // namespace ipp
