#include "evac/ten.hpp"

#include "evac/error.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace evac::ten {

Label node_label(int i, int t, int n) {
  return static_cast<Label>(i) + static_cast<Label>(n) * static_cast<Label>(t);
}

LabelParts decode_label(Label label, int n) {
  const Label zero_based = label - 1;
  return {static_cast<int>(zero_based % n), static_cast<int>(zero_based / n)};
}

const char* to_string(ArcKind kind) {
  switch (kind) {
    case ArcKind::Movement: return "movement";
    case ArcKind::Holdover: return "holdover";
    case ArcKind::Super: return "super";
    case ArcKind::Stranded: return "stranded";
  }
  return "?";
}

ArcKind arc_kind_from_string(const std::string& s) {
  if (s == "movement") return ArcKind::Movement;
  if (s == "holdover") return ArcKind::Holdover;
  if (s == "super") return ArcKind::Super;
  if (s == "stranded") return ArcKind::Stranded;
  throw InputError("unknown arc kind '" + s + "'");
}

bool arc_less(const ExpandedArc& a, const ExpandedArc& b) {
  return std::tuple(a.from, a.to, a.kind) < std::tuple(b.from, b.to, b.kind);
}

Ten build_ten(const roadnet::DynamicNetwork& net, int T, bool holdover_all_nodes) {
  if (T < 0) throw InputError("time horizon must be >= 0");
  const int n = net.node_count();
  Ten ten;
  ten.horizon = T;
  ten.base_node_count = n;
  ten.nodes.reserve(static_cast<std::size_t>(T + 1) * n);
  for (int t = 0; t <= T; ++t) {
    for (int i = 0; i < n; ++i) ten.nodes.push_back(node_label(i + 1, t, n));
  }

  for (int k = 0; k < net.arc_count(); ++k) {
    const auto& arc = net.arcs[k];
    for (int t = 0; t + arc.travel_time <= T; ++t) {
      const int arrive = t + arc.travel_time;
      ten.movement_arcs.push_back({node_label(arc.from + 1, t, n), node_label(arc.to + 1, arrive, n),
                                   arc.capacity, ArcKind::Movement, k, -1, t, arrive});
    }
  }
  for (int i = 0; i < n; ++i) {
    const auto& node = net.nodes[i];
    if (!holdover_all_nodes && !node.is_source() && !node.is_sink()) continue;
    for (int t = 0; t < T; ++t) {
      ten.holdover_arcs.push_back({node_label(i + 1, t, n), node_label(i + 1, t + 1, n),
                                   net.holdover_capacity(i), ArcKind::Holdover, -1, i, t, t + 1});
    }
    if (node.is_source()) ten.sources.push_back(node_label(i + 1, 0, n));
    if (node.is_sink()) ten.sinks.push_back(node_label(i + 1, T, n));
  }
  std::sort(ten.movement_arcs.begin(), ten.movement_arcs.end(), arc_less);
  std::sort(ten.holdover_arcs.begin(), ten.holdover_arcs.end(), arc_less);
  return ten;
}

std::string dump_edge_list(const std::vector<ExpandedArc>& arcs) {
  std::vector<ExpandedArc> sorted = arcs;
  std::sort(sorted.begin(), sorted.end(), arc_less);
  std::ostringstream out;
  for (const auto& a : sorted) {
    out << a.from << ' ' << a.to << ' ' << a.capacity << ' ' << to_string(a.kind) << '\n';
  }
  return out.str();
}

}  // namespace evac::ten
