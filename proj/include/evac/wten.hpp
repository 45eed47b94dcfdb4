#pragma once

// Wildfire time-expanded network: the time expansion restricted to node
// copies the fire has not reached, with movement capacities scaled by how
// close each road is to the fire, plus a super source and super sink.

#include "evac/fire.hpp"
#include "evac/roadnet.hpp"
#include "evac/ten.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace evac::wten {

using ten::ArcKind;
using ten::ExpandedArc;
using ten::Label;

/// Roads keep this fraction of capacity or more; below it they close.
inline constexpr double kCapacityCutoff = 0.2;

/// Share of a road's capacity left when the fire is `f_m` meters away and the
/// road takes `lambda` instances: 1 if f >= lambda, f / lambda otherwise.
double capacity_fraction(double f_m, int lambda);

/// floor(u * p), or 0 when p < kCapacityCutoff.
std::int64_t scaled_capacity(std::int64_t capacity, double f_m, int lambda);

/// Supply injected at a node copy (local instance).
struct SourceSupply {
  int node = 0;
  int t = 0;
  std::int64_t supply = 0;

  friend bool operator==(const SourceSupply&, const SourceSupply&) = default;
};

struct WtenOptions {
  /// Global instance represented by local instance 0 (replanning builds a
  /// network over [t_offset..t_offset + T] relabelled to start at 0).
  int t_offset = 0;
  /// Replaces the network's own sources at t = 0 when set.
  std::optional<std::vector<SourceSupply>> sources;
  /// Per-node super-sink capacity replacing the node's demand (size |N| or empty).
  std::vector<std::int64_t> sink_capacity;
  bool holdover_all_nodes = false;
};

struct Wten {
  int horizon = 0;   // local T
  int t_offset = 0;
  int base_node_count = 0;
  std::vector<Label> nodes;        // surviving labels plus the two terminals, sorted
  std::vector<ExpandedArc> arcs;   // canonical order; times and labels are local
  std::vector<Label> sources;      // S_W
  std::vector<Label> sinks;        // D_W
  std::vector<int> t_max;          // per base node: last local instance a sink survives, -1 otherwise

  std::size_t count(ArcKind kind) const;
  Label to_global(Label local) const;
  /// Arc with labels and instances shifted back by t_offset.
  ExpandedArc to_global(const ExpandedArc& local) const;
};

/// Builds the network over local instances [0..T]; the cache must cover
/// global instances [t_offset..t_offset + T]. Throws InfeasibleError when
/// every sink (or, for the network's own sources, every source) is burnt at
/// the first instance.
Wten build_wten(const roadnet::DynamicNetwork& net, const fire::FireCache& cache, int T,
                const WtenOptions& options = {});

}  // namespace evac::wten
