#pragma once

// Hazard scenarios F(t) and the per-instance cache of overtaken nodes and
// road-to-fire distances.

#include "evac/geometry.hpp"
#include "evac/roadnet.hpp"

#include <nlohmann/json.hpp>

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace evac::fire {

using geometry::FireSet;
using geometry::Point;

struct GrowingCircle {
  Point center;
  double r0 = 0.0;      // meters at t = 0, > 0
  double growth = 1.0;  // meters per instance, >= 0
};

struct Frame {
  int t = 0;
  FireSet set;
};

/// Either a union of linearly growing circles or a step-held sequence of frames.
class FireScenario {
public:
  FireScenario() = default;
  static FireScenario circles(std::vector<GrowingCircle> circles);
  /// Frames are sorted by t; duplicate instants are rejected.
  static FireScenario frames(std::vector<Frame> frames);

  bool is_circles() const { return std::holds_alternative<std::vector<GrowingCircle>>(data_); }
  const std::vector<GrowingCircle>& circle_list() const;
  const std::vector<Frame>& frame_list() const;

  /// First and last covered instance (circle mode covers [0, +inf)).
  int first_instance() const;
  int last_instance() const;
  bool covers(int t_begin, int t_end) const;

private:
  std::variant<std::vector<GrowingCircle>, std::vector<Frame>> data_;
};

inline constexpr int kUnbounded = std::numeric_limits<int>::max();

/// F(t). Circle radii grow as r0 + growth * t; frames hold the latest frame
/// at or before t. Throws InputError outside the covered range.
FireSet fire_set_at(const FireScenario& scenario, int t);

/// First instance t in (first, T] where F(t-1) is not contained in F(t),
/// or nullopt if the scenario is monotone over [first..T].
std::optional<int> validate_monotone(const FireScenario& scenario, int T);

/// Frame scenario with F_old(t) for t < t_fire and F_old(t) ∪ F_new(t)
/// for t_fire <= t <= T.
FireScenario merge_scenarios(const FireScenario& old_scenario, const FireScenario& new_scenario,
                             int t_fire, int T);

/// Stable hex digest of the scenario's geometry, for tagging plans.
std::string fingerprint(const FireScenario& scenario);

/// Parses a fire document, projecting coordinates about `origin`.
FireScenario parse_scenario(const nlohmann::json& doc, const geometry::GeoOrigin& origin);

/// Per-instance overtaken nodes N_F(t) and arc distances f_ij(t) over [t_begin..t_end].
class FireCache {
public:
  static constexpr double kNoFire = std::numeric_limits<double>::infinity();

  FireCache(const roadnet::DynamicNetwork& net, FireScenario scenario, int t_begin = 0);

  /// Computes instances up to and including t_end (no-op if already covered).
  void extend_to(int t_end);

  int t_begin() const { return t_begin_; }
  int t_end() const { return t_begin_ + static_cast<int>(overtaken_.size()) - 1; }
  const FireScenario& scenario() const { return scenario_; }

  bool overtaken(int t, int node) const { return overtaken_.at(index(t))[node] != 0; }
  /// Meters from the arc geometry to F(t); kNoFire when F(t) is empty.
  double arc_dist(int t, int arc) const { return arc_dist_.at(index(t))[arc]; }
  std::vector<int> overtaken_nodes(int t) const;

private:
  std::size_t index(int t) const;

  std::vector<Point> points_;
  std::vector<geometry::Polyline> lines_;
  FireScenario scenario_;
  int t_begin_;
  std::vector<std::vector<char>> overtaken_;
  std::vector<std::vector<double>> arc_dist_;
};

/// Builds the cache over [0..T] in one go.
FireCache build_cache(const roadnet::DynamicNetwork& net, const FireScenario& scenario, int T);

}  // namespace evac::fire
