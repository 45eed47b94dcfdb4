#include "evac/fire.hpp"

#include "evac/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <thread>

namespace evac::fire {

namespace {

using nlohmann::json;

// Points probing a circle boundary for the sampled monotonicity check.
constexpr int kCircleProbes = 32;

// A component of `next` that trivially contains `c` (same center, no smaller radius).
bool circle_kept(const geometry::Circle& c, const FireSet& next) {
  return std::any_of(next.circles.begin(), next.circles.end(), [&](const geometry::Circle& d) {
    return d.center == c.center && d.radius >= c.radius;
  });
}

bool polygon_kept(const geometry::Polygon& p, const FireSet& next) {
  return std::any_of(next.polygons.begin(), next.polygons.end(),
                     [&](const geometry::Polygon& q) { return q.ring == p.ring; });
}

// Sample points on the boundary of every component of `set` that `next` does
// not carry over verbatim. Circle probes sit a hair inside the rim so rounding
// in cos/sin cannot flag an unchanged circle.
std::vector<Point> boundary_probes(const FireSet& set, const FireSet& next) {
  std::vector<Point> out;
  for (const auto& c : set.circles) {
    if (circle_kept(c, next)) continue;
    const double r = c.radius * (1.0 - 1e-12);
    for (int k = 0; k < kCircleProbes; ++k) {
      const double a = 2.0 * std::numbers::pi * k / kCircleProbes;
      out.push_back({c.center.x + r * std::cos(a), c.center.y + r * std::sin(a)});
    }
  }
  for (const auto& poly : set.polygons) {
    if (polygon_kept(poly, next)) continue;
    out.insert(out.end(), poly.ring.begin(), poly.ring.end());
  }
  return out;
}

geometry::Polygon parse_ring(const json& ring, const geometry::GeoOrigin& origin) {
  if (!ring.is_array()) throw InputError("fire: polygon ring must be an array of [lat, lon]");
  geometry::Polygon poly;
  for (const auto& ll : ring) {
    if (!ll.is_array() || ll.size() != 2 || !ll[0].is_number() || !ll[1].is_number()) {
      throw InputError("fire: ring vertex must be [lat, lon]");
    }
    poly.ring.push_back(geometry::project(ll[0].get<double>(), ll[1].get<double>(), origin));
  }
  if (poly.ring.size() >= 2 && poly.ring.front() == poly.ring.back()) poly.ring.pop_back();
  if (poly.ring.size() < 3) throw InputError("fire: polygon ring needs at least three vertices");
  return poly;
}

double number_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw InputError(std::string("fire: missing numeric field '") + key + "'");
  }
  return it->get<double>();
}

// Runs body(k) for k in [0, n), split across hardware threads when available.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, n / 256 + 1);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t k = lo; k < hi; ++k) body(k);
    });
  }
}

}  // namespace

FireScenario FireScenario::circles(std::vector<GrowingCircle> circles) {
  for (const auto& c : circles) {
    if (!(c.r0 > 0.0)) throw InputError("fire: circle radius must be positive");
    if (!(c.growth >= 0.0)) throw InputError("fire: circle growth must be >= 0");
  }
  FireScenario s;
  s.data_ = std::move(circles);
  return s;
}

FireScenario FireScenario::frames(std::vector<Frame> frames) {
  if (frames.empty()) throw InputError("fire: frame scenario needs at least one frame");
  std::sort(frames.begin(), frames.end(), [](const Frame& a, const Frame& b) { return a.t < b.t; });
  for (std::size_t k = 1; k < frames.size(); ++k) {
    if (frames[k].t == frames[k - 1].t) {
      throw InputError("fire: duplicate frame at t=" + std::to_string(frames[k].t));
    }
  }
  FireScenario s;
  s.data_ = std::move(frames);
  return s;
}

const std::vector<GrowingCircle>& FireScenario::circle_list() const {
  return std::get<std::vector<GrowingCircle>>(data_);
}

const std::vector<Frame>& FireScenario::frame_list() const { return std::get<std::vector<Frame>>(data_); }

int FireScenario::first_instance() const { return is_circles() ? 0 : frame_list().front().t; }

int FireScenario::last_instance() const { return is_circles() ? kUnbounded : frame_list().back().t; }

bool FireScenario::covers(int t_begin, int t_end) const {
  return first_instance() <= t_begin && t_end <= last_instance();
}

FireSet fire_set_at(const FireScenario& scenario, int t) {
  if (scenario.is_circles()) {
    if (t < 0) throw InputError("fire: negative instance");
    FireSet set;
    for (const auto& c : scenario.circle_list()) {
      set.circles.push_back({c.center, c.r0 + c.growth * t});
    }
    return set;
  }
  const auto& frames = scenario.frame_list();
  if (t < frames.front().t || t > frames.back().t) {
    throw InputError("fire: instance " + std::to_string(t) + " outside frame coverage [" +
                     std::to_string(frames.front().t) + ", " + std::to_string(frames.back().t) + "]");
  }
  auto it = std::upper_bound(frames.begin(), frames.end(), t,
                             [](int value, const Frame& f) { return value < f.t; });
  return std::prev(it)->set;
}

std::optional<int> validate_monotone(const FireScenario& scenario, int T) {
  // Circle growth >= 0 is enforced at construction.
  if (scenario.is_circles()) return std::nullopt;
  // Step-hold makes F constant between frames, so only frame boundaries can shrink.
  const auto& frames = scenario.frame_list();
  for (std::size_t k = 1; k < frames.size() && frames[k].t <= T; ++k) {
    for (const auto& p : boundary_probes(frames[k - 1].set, frames[k].set)) {
      if (!geometry::contains(frames[k].set, p)) return frames[k].t;
    }
  }
  return std::nullopt;
}

FireScenario merge_scenarios(const FireScenario& old_scenario, const FireScenario& new_scenario,
                             int t_fire, int T) {
  if (!old_scenario.covers(0, T)) {
    throw InputError("fire: original scenario does not cover [0, " + std::to_string(T) + "]");
  }
  if (t_fire > T || !new_scenario.covers(t_fire, T)) {
    throw InputError("fire: updated scenario does not cover [" + std::to_string(t_fire) + ", " +
                     std::to_string(T) + "]");
  }
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(T) + 1);
  for (int t = 0; t <= T; ++t) {
    FireSet set = fire_set_at(old_scenario, t);
    if (t >= t_fire) set.unite(fire_set_at(new_scenario, t));
    frames.push_back({t, std::move(set)});
  }
  return FireScenario::frames(std::move(frames));
}

std::string fingerprint(const FireScenario& scenario) {
  // FNV-1a over the raw bytes of every number, in a fixed traversal order.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
      h ^= bytes[k];
      h *= 1099511628211ULL;
    }
  };
  auto mix_set = [&](const FireSet& set) {
    for (const auto& c : set.circles) {
      mix(&c.center.x, sizeof(double));
      mix(&c.center.y, sizeof(double));
      mix(&c.radius, sizeof(double));
    }
    for (const auto& poly : set.polygons) {
      const std::size_t n = poly.ring.size();
      mix(&n, sizeof n);
      for (const auto& p : poly.ring) {
        mix(&p.x, sizeof(double));
        mix(&p.y, sizeof(double));
      }
    }
  };
  if (scenario.is_circles()) {
    mix("circles", 7);
    for (const auto& c : scenario.circle_list()) {
      mix(&c.center.x, sizeof(double));
      mix(&c.center.y, sizeof(double));
      mix(&c.r0, sizeof(double));
      mix(&c.growth, sizeof(double));
    }
  } else {
    mix("frames", 6);
    for (const auto& f : scenario.frame_list()) {
      mix(&f.t, sizeof f.t);
      mix_set(f.set);
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

FireScenario parse_scenario(const json& doc, const geometry::GeoOrigin& origin) {
  if (!doc.is_object()) throw InputError("fire document must be a JSON object");
  const auto type_it = doc.find("type");
  if (type_it == doc.end() || !type_it->is_string()) throw InputError("fire: missing 'type'");
  const auto type = type_it->get<std::string>();

  if (type == "circles") {
    const auto list = doc.find("circles");
    if (list == doc.end() || !list->is_array()) throw InputError("fire: 'circles' must be an array");
    std::vector<GrowingCircle> circles;
    for (const auto& jc : *list) {
      GrowingCircle c;
      c.center = geometry::project(number_field(jc, "lat"), number_field(jc, "lon"), origin);
      c.r0 = number_field(jc, "r0_m");
      c.growth = jc.contains("growth_m_per_instance") ? number_field(jc, "growth_m_per_instance") : 1.0;
      circles.push_back(c);
    }
    return FireScenario::circles(std::move(circles));
  }
  if (type == "frames") {
    const auto list = doc.find("frames");
    if (list == doc.end() || !list->is_array()) throw InputError("fire: 'frames' must be an array");
    std::vector<Frame> frames;
    for (const auto& jf : *list) {
      if (!jf.is_object() || !jf.contains("t") || !jf.at("t").is_number_integer()) {
        throw InputError("fire: frame needs an integer 't'");
      }
      Frame f;
      f.t = jf.at("t").get<int>();
      const auto mp = jf.find("multipolygon");
      if (mp == jf.end() || !mp->is_array()) throw InputError("fire: frame needs a 'multipolygon' array");
      for (const auto& ring : *mp) f.set.polygons.push_back(parse_ring(ring, origin));
      frames.push_back(std::move(f));
    }
    return FireScenario::frames(std::move(frames));
  }
  throw InputError("fire: unknown scenario type '" + type + "'");
}

FireCache::FireCache(const roadnet::DynamicNetwork& net, FireScenario scenario, int t_begin)
    : scenario_(std::move(scenario)), t_begin_(t_begin) {
  points_.reserve(net.nodes.size());
  for (const auto& n : net.nodes) points_.push_back(n.point);
  lines_.reserve(net.arcs.size());
  for (const auto& a : net.arcs) lines_.push_back(a.geometry);
}

std::size_t FireCache::index(int t) const {
  if (t < t_begin_ || t > t_end()) {
    throw std::out_of_range("fire cache does not hold instance " + std::to_string(t));
  }
  return static_cast<std::size_t>(t - t_begin_);
}

void FireCache::extend_to(int t_end_wanted) {
  for (int t = t_end() + 1; t <= t_end_wanted; ++t) {
    const geometry::FireIndex index(fire_set_at(scenario_, t));
    std::vector<char> over(points_.size(), 0);
    for (std::size_t k = 0; k < points_.size(); ++k) over[k] = index.contains(points_[k]) ? 1 : 0;
    std::vector<double> dist(lines_.size(), kNoFire);
    if (!index.set().empty()) {
      parallel_for(lines_.size(), [&](std::size_t k) { dist[k] = index.distance(lines_[k]).value_or(kNoFire); });
    }
    overtaken_.push_back(std::move(over));
    arc_dist_.push_back(std::move(dist));
  }
}

std::vector<int> FireCache::overtaken_nodes(int t) const {
  std::vector<int> out;
  const auto& row = overtaken_.at(index(t));
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k]) out.push_back(static_cast<int>(k));
  }
  return out;
}

FireCache build_cache(const roadnet::DynamicNetwork& net, const FireScenario& scenario, int T) {
  FireCache cache(net, scenario, 0);
  cache.extend_to(T);
  return cache;
}

}  // namespace evac::fire
