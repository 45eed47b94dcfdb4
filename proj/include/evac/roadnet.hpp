#pragma once

// Static road network annotated for dynamic flows: integer travel times,
// per-instance capacities, supplies and demands.

#include "evac/geometry.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace evac::roadnet {

using geometry::Point;
using geometry::Polyline;

struct Node {
  std::string id;
  Point point;
  std::int64_t supply = 0;  // people starting here (source when > 0)
  std::int64_t demand = 0;  // people this safe location accepts (sink when > 0)

  bool is_source() const { return supply > 0; }
  bool is_sink() const { return demand > 0; }
};

struct Arc {
  int from = 0;  // node index
  int to = 0;
  int travel_time = 1;         // instances, >= 1
  std::int64_t capacity = 0;   // people per instance
  Polyline geometry;           // ordered from -> to
  std::string name;
  int lanes = 1;
  double speed_mps = 1.0;
};

/// Safe-headway constants for the Moore capacity estimate.
struct MooreParams {
  double vehicle_length_m = 5.0;
  double reaction_time_s = 2.0;
  double occupancy = 1.0;  // people per vehicle
};

struct DynamicNetwork {
  std::vector<Node> nodes;
  std::vector<Arc> arcs;
  double dt_seconds = 60.0;
  geometry::GeoOrigin origin;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int arc_count() const { return static_cast<int>(arcs.size()); }
  /// Index of the node with this id, or -1.
  int find_node(const std::string& id) const;
  std::vector<int> sources() const;
  std::vector<int> sinks() const;
  std::int64_t total_supply() const;
  /// a_i(0): supply for sources, demand for sinks, 0 otherwise.
  std::int64_t holdover_capacity(int node) const;
  /// Sum of all arc travel times (no-improvement window of the horizon search).
  std::int64_t travel_time_sum() const;
};

/// floor(per-lane flow * lanes * dt * occupancy) with per-lane flow
/// speed / (L_veh + speed * t_r) vehicles per second.
std::int64_t moore_capacity(double speed_mps, int lanes, double dt_seconds,
                            const MooreParams& params = {});

/// ceil(seconds / dt), never below one instance.
int round_travel_time(double seconds, double dt_seconds);

/// Parses a network document (see README for the schema) and projects it
/// about the node centroid. Throws InputError on schema or topology problems.
DynamicNetwork load_network(const nlohmann::json& doc, const MooreParams& params = {});
DynamicNetwork load_network_file(const std::filesystem::path& path, const MooreParams& params = {});

/// Merges nodes closer than `tolerance_m` until no such pair remains.
DynamicNetwork contract(const DynamicNetwork& net, double tolerance_m);

/// Throws InputError("disconnected") unless the network is weakly connected.
void check_connected(const DynamicNetwork& net);

/// Starting horizon for the plan search: the longest source-to-nearest-sink
/// travel time plus the arc count of that path.
int initial_horizon(const DynamicNetwork& net);

/// Longest source-to-nearest-sink travel time alone (a true lower bound on
/// any complete evacuation horizon).
int shortest_evacuation_bound(const DynamicNetwork& net);

}  // namespace evac::roadnet
