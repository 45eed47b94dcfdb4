#pragma once

// Plain time-expanded network: one copy of every node per instance, movement
// arcs spanning each road's travel time, holdover arcs at sources and sinks.

#include "evac/roadnet.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace evac::ten {

/// Node copy i(t) = i + |N| * t with 1-based base index i; 0 and negative
/// values are reserved for the artificial terminals below.
using Label = std::int64_t;

inline constexpr Label kSuperSource = 0;
inline constexpr Label kSuperSink = -1;
/// Terminal absorbing people caught between a fixed plan prefix and a replan.
inline constexpr Label kStranded = -2;

Label node_label(int i, int t, int n);

struct LabelParts {
  int node = 0;  // 0-based base node index
  int t = 0;
};

/// Inverse of node_label for ordinary (positive) labels.
LabelParts decode_label(Label label, int n);

enum class ArcKind { Movement, Holdover, Super, Stranded };

const char* to_string(ArcKind kind);
ArcKind arc_kind_from_string(const std::string& s);

struct ExpandedArc {
  Label from = 0;
  Label to = 0;
  std::int64_t capacity = 0;
  ArcKind kind = ArcKind::Movement;
  int base_arc = -1;   // movement arcs: index into DynamicNetwork::arcs
  int base_node = -1;  // holdover / super / stranded arcs: the node concerned
  int depart_t = 0;
  int arrive_t = 0;

  friend bool operator==(const ExpandedArc&, const ExpandedArc&) = default;
};

/// Canonical arc order: (from, to, kind).
bool arc_less(const ExpandedArc& a, const ExpandedArc& b);

struct Ten {
  int horizon = 0;
  int base_node_count = 0;
  std::vector<Label> nodes;
  std::vector<ExpandedArc> movement_arcs;
  std::vector<ExpandedArc> holdover_arcs;
  std::vector<Label> sources;  // S at t = 0
  std::vector<Label> sinks;    // D at t = T
};

/// Time expansion over [0..T]. Holdover arcs exist at sources and sinks only,
/// unless `holdover_all_nodes` is set.
Ten build_ten(const roadnet::DynamicNetwork& net, int T, bool holdover_all_nodes = false);

/// One arc per line: "from to capacity kind", in canonical order.
std::string dump_edge_list(const std::vector<ExpandedArc>& arcs);

}  // namespace evac::ten
