#include "ipp/stopping.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace ipp {

double TimeOrBeyond::value() const {
  if (beyond_) throw ValidationError("beyond-horizon has no finite value");
  return time_;
}

TimeOrBeyond min_value(TimeOrBeyond a, TimeOrBeyond b) { return a < b ? a : b; }
TimeOrBeyond max_value(TimeOrBeyond a, TimeOrBeyond b) { return a < b ? b : a; }

struct StoppingTime::Node {
  enum class Kind { constant, hit_level, next_jump_after, min, max, grid_scan };
  Kind kind;
  double t = 0.0;                    // constant
  long m = 0;                        // hit_level
  double grid_s = 0.0, grid_t = 0.0; // grid_scan window
  long cells = 0;                    // grid_scan resolution
  std::shared_ptr<const Node> a, b;  // children
};

namespace {

using Node = StoppingTime::Node;
using Kind = Node::Kind;

TimeOrBeyond eval_node(const Node* node, const CountingPath& path, StopEvalCache& cache);

// First jump time strictly after `after`, or beyond-horizon.
TimeOrBeyond first_jump_after(const CountingPath& path, double after) {
  const auto& jumps = path.jump_times();
  auto it = std::upper_bound(jumps.begin(), jumps.end(), after);
  if (it == jumps.end()) return TimeOrBeyond::beyond();
  return TimeOrBeyond::at(*it);
}

// First time some grid cell's count rises two above its cell-start count.
// Scans cells in order; the first hit is the infimum since cells ascend.
TimeOrBeyond eval_grid_scan(const Node* node, const CountingPath& path) {
  const auto& jumps = path.jump_times();
  const double width = (node->grid_t - node->grid_s) / static_cast<double>(node->cells);
  for (long k = 0; k < node->cells; ++k) {
    const double a = node->grid_s + width * static_cast<double>(k);
    if (a > path.horizon()) break;
    const double b_raw = (k + 1 == node->cells) ? node->grid_t : a + width;
    const double b = std::min(b_raw, path.horizon());
    const long base = std::upper_bound(jumps.begin(), jumps.end(), a) - jumps.begin();
    if (base + 1 < static_cast<long>(jumps.size())) {
      const double second = jumps[static_cast<std::size_t>(base + 1)];
      if (second <= b) return TimeOrBeyond::at(second);
    }
  }
  return TimeOrBeyond::beyond();
}

TimeOrBeyond eval_node_inner(const Node* node, const CountingPath& path, StopEvalCache& cache) {
  switch (node->kind) {
    case Kind::constant:
      return node->t <= path.horizon() ? TimeOrBeyond::at(node->t) : TimeOrBeyond::beyond();
    case Kind::hit_level: {
      const auto& jumps = path.jump_times();
      if (static_cast<long>(jumps.size()) >= node->m) {
        return TimeOrBeyond::at(jumps[static_cast<std::size_t>(node->m - 1)]);
      }
      return TimeOrBeyond::beyond();
    }
    case Kind::next_jump_after: {
      TimeOrBeyond inner = eval_node(node->a.get(), path, cache);
      if (inner.is_beyond()) return TimeOrBeyond::beyond();
      return first_jump_after(path, inner.value());
    }
    case Kind::min:
      return min_value(eval_node(node->a.get(), path, cache),
                       eval_node(node->b.get(), path, cache));
    case Kind::max:
      return max_value(eval_node(node->a.get(), path, cache),
                       eval_node(node->b.get(), path, cache));
    case Kind::grid_scan:
      return eval_grid_scan(node, path);
  }
  throw ValidationError("unknown stopping-time node");
}

TimeOrBeyond eval_node(const Node* node, const CountingPath& path, StopEvalCache& cache) {
  auto it = cache.memo.find(node);
  if (it != cache.memo.end()) return it->second;
  TimeOrBeyond v = eval_node_inner(node, path, cache);
  cache.memo.emplace(node, v);
  return v;
}

std::optional<double> static_bound_node(const Node* node) {
  switch (node->kind) {
    case Kind::constant:
      return node->t;
    case Kind::grid_scan:
      return node->grid_t;
    case Kind::hit_level:
    case Kind::next_jump_after:
      return std::nullopt;
    case Kind::min: {
      auto ba = static_bound_node(node->a.get());
      auto bb = static_bound_node(node->b.get());
      if (ba && bb) return std::min(*ba, *bb);
      return ba ? ba : bb;  // min is dominated by either bounded branch
    }
    case Kind::max: {
      auto ba = static_bound_node(node->a.get());
      auto bb = static_bound_node(node->b.get());
      if (ba && bb) return std::max(*ba, *bb);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

nlohmann::json node_to_json(const Node* node) {
  nlohmann::json j;
  switch (node->kind) {
    case Kind::constant:
      j["kind"] = "constant";
      j["t"] = node->t;
      break;
    case Kind::hit_level:
      j["kind"] = "hit_level";
      j["m"] = node->m;
      break;
    case Kind::next_jump_after:
      j["kind"] = "next_jump_after";
      j["inner"] = node_to_json(node->a.get());
      break;
    case Kind::min:
      j["kind"] = "min";
      j["a"] = node_to_json(node->a.get());
      j["b"] = node_to_json(node->b.get());
      break;
    case Kind::max:
      j["kind"] = "max";
      j["a"] = node_to_json(node->a.get());
      j["b"] = node_to_json(node->b.get());
      break;
    case Kind::grid_scan:
      j["kind"] = "grid_scan";
      j["s"] = node->grid_s;
      j["t"] = node->grid_t;
      j["cells"] = node->cells;
      break;
  }
  return j;
}

StoppingTime node_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return StoppingTime::constant(j.at("t").get<double>());
  if (kind == "hit_level") return StoppingTime::hit_level(j.at("m").get<long>());
  if (kind == "next_jump_after") return StoppingTime::next_jump_after(node_from_json(j.at("inner")));
  if (kind == "min") return StoppingTime::min_of(node_from_json(j.at("a")), node_from_json(j.at("b")));
  if (kind == "max") return StoppingTime::max_of(node_from_json(j.at("a")), node_from_json(j.at("b")));
  if (kind == "grid_scan") {
    return StoppingTime::two_jump_cell_scan(j.at("s").get<double>(), j.at("t").get<double>(),
                                            j.at("cells").get<long>());
  }
  throw ValidationError("unknown stopping-time kind: " + kind);
}

}  // namespace

StoppingTime StoppingTime::constant(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("constant stopping time must be finite and >= 0");
  auto node = std::make_shared<Node>();
  node->kind = Kind::constant;
  node->t = t;
  return StoppingTime(std::move(node));
}

StoppingTime StoppingTime::hit_level(long m) {
  if (m < 1) throw ValidationError("hit level must be >= 1");
  auto node = std::make_shared<Node>();
  node->kind = Kind::hit_level;
  node->m = m;
  return StoppingTime(std::move(node));
}

StoppingTime StoppingTime::next_jump_after(StoppingTime inner) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::next_jump_after;
  node->a = inner.node_;
  return StoppingTime(std::move(node));
}

StoppingTime StoppingTime::min_of(StoppingTime a, StoppingTime b) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::min;
  node->a = a.node_;
  node->b = b.node_;
  return StoppingTime(std::move(node));
}

StoppingTime StoppingTime::max_of(StoppingTime a, StoppingTime b) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::max;
  node->a = a.node_;
  node->b = b.node_;
  return StoppingTime(std::move(node));
}

StoppingTime StoppingTime::two_jump_cell_scan(double s, double t, long cells) {
  if (!(s >= 0.0) || !(t > s) || cells < 1) {
    throw ValidationError("grid scan needs 0 <= s < t and cells >= 1");
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::grid_scan;
  node->grid_s = s;
  node->grid_t = t;
  node->cells = cells;
  return StoppingTime(std::move(node));
}

TimeOrBeyond StoppingTime::eval(const CountingPath& path) const {
  StopEvalCache cache;
  cache.path = &path;
  return eval_node(node_.get(), path, cache);
}

TimeOrBeyond StoppingTime::eval(const CountingPath& path, StopEvalCache& cache) const {
  if (cache.path != &path) {
    cache.path = &path;
    cache.memo.clear();
  }
  return eval_node(node_.get(), path, cache);
}

std::optional<double> StoppingTime::static_time_bound() const {
  return static_bound_node(node_.get());
}

std::string StoppingTime::to_json() const { return node_to_json(node_.get()).dump(); }

StoppingTime StoppingTime::from_json(const std::string& text) {
  try {
    return node_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad stopping-time JSON: ") + e.what());
  }
}

MeasurabilityReport measurability_check(
    const PathFunctional& tau,
    const std::vector<std::pair<CountingPath, CountingPath>>& pairs) {
  MeasurabilityReport report;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const CountingPath& p1 = pairs[i].first;
    const CountingPath& p2 = pairs[i].second;
    if (p1.horizon() != p2.horizon()) {
      throw ValidationError("measurability pairs must share a horizon");
    }
    ++report.pairs_checked;
    const TimeOrBeyond v1 = tau(p1);
    const double upto = v1.is_beyond() ? p1.horizon() : v1.value();
    if (!agree_up_to(p1, p2, upto)) continue;
    ++report.pairs_applicable;
    const TimeOrBeyond v2 = tau(p2);
    if (!(v1 == v2)) report.violation_indices.push_back(i);
  }
  return report;
}

MeasurabilityReport measurability_check(
    const StoppingTime& tau,
    const std::vector<std::pair<CountingPath, CountingPath>>& pairs) {
  return measurability_check(
      PathFunctional([&tau](const CountingPath& p) { return tau.eval(p); }), pairs);
}

}  // namespace ipp
