#include "evac/wten.hpp"

#include "evac/error.hpp"

#include <algorithm>
#include <cmath>

namespace evac::wten {

double capacity_fraction(double f_m, int lambda) {
  if (f_m >= lambda) return 1.0;
  return f_m / lambda;
}

std::int64_t scaled_capacity(std::int64_t capacity, double f_m, int lambda) {
  if (f_m >= lambda) return capacity;
  // Compare f against the cutoff share of lambda rather than dividing first, so
  // a fraction of exactly 20% is not lost to rounding.
  if (f_m < kCapacityCutoff * lambda * (1.0 - 1e-12)) return 0;
  return static_cast<std::int64_t>(std::floor(static_cast<double>(capacity) * f_m / lambda + 1e-9));
}

std::size_t Wten::count(ArcKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(arcs.begin(), arcs.end(), [kind](const ExpandedArc& a) { return a.kind == kind; }));
}

Label Wten::to_global(Label local) const {
  if (local <= 0 || t_offset == 0) return local;
  const auto parts = ten::decode_label(local, base_node_count);
  return ten::node_label(parts.node + 1, parts.t + t_offset, base_node_count);
}

ExpandedArc Wten::to_global(const ExpandedArc& local) const {
  ExpandedArc g = local;
  g.from = to_global(local.from);
  g.to = to_global(local.to);
  g.depart_t += t_offset;
  g.arrive_t += t_offset;
  return g;
}

Wten build_wten(const roadnet::DynamicNetwork& net, const fire::FireCache& cache, int T,
                const WtenOptions& options) {
  if (T < 0) throw InputError("time horizon must be >= 0");
  const int n = net.node_count();
  const int offset = options.t_offset;
  if (cache.t_begin() > offset || cache.t_end() < offset + T) {
    throw InputError("fire cache does not cover the requested horizon");
  }
  auto alive = [&](int node, int t) { return !cache.overtaken(t + offset, node); };
  auto label = [n](int node, int t) { return ten::node_label(node + 1, t, n); };

  Wten w;
  w.horizon = T;
  w.t_offset = offset;
  w.base_node_count = n;
  w.t_max.assign(static_cast<std::size_t>(n), -1);

  // Sources and sinks are checked before anything is built.
  const auto sinks = net.sinks();
  bool any_sink = false;
  for (int d : sinks) {
    if (!alive(d, 0)) continue;
    int last = 0;
    while (last < T && alive(d, last + 1)) ++last;
    w.t_max[d] = last;
    any_sink = true;
  }
  if (!any_sink) {
    throw InfeasibleError("no reachable sink: every sink is overtaken by the fire at t=" +
                          std::to_string(offset));
  }

  std::vector<SourceSupply> sources;
  if (options.sources) {
    for (const auto& s : *options.sources) {
      if (s.supply <= 0) continue;
      if (s.t < 0 || s.t > T) throw InputError("source instance outside the horizon");
      if (alive(s.node, s.t)) sources.push_back(s);
    }
  } else {
    const auto own = net.sources();
    for (int s : own) {
      if (alive(s, 0)) sources.push_back({s, 0, net.nodes[s].supply});
    }
    if (!own.empty() && sources.empty()) {
      throw InfeasibleError("nothing to evacuate safely: every source is overtaken by the fire at t=0");
    }
  }

  w.nodes.push_back(ten::kSuperSink);
  w.nodes.push_back(ten::kSuperSource);
  for (int t = 0; t <= T; ++t) {
    for (int i = 0; i < n; ++i) {
      if (alive(i, t)) w.nodes.push_back(label(i, t));
    }
  }

  for (int k = 0; k < net.arc_count(); ++k) {
    const auto& arc = net.arcs[k];
    for (int t = 0; t + arc.travel_time <= T; ++t) {
      const int arrive = t + arc.travel_time;
      if (!alive(arc.from, t) || !alive(arc.to, arrive)) continue;
      const double f = cache.arc_dist(t + offset, k);
      w.arcs.push_back({label(arc.from, t), label(arc.to, arrive),
                        scaled_capacity(arc.capacity, f, arc.travel_time), ArcKind::Movement, k, -1, t,
                        arrive});
    }
  }

  for (int i = 0; i < n; ++i) {
    const auto& node = net.nodes[i];
    if (!options.holdover_all_nodes && !node.is_source() && !node.is_sink()) continue;
    for (int t = 0; t < T; ++t) {
      if (!alive(i, t) || !alive(i, t + 1)) continue;
      w.arcs.push_back({label(i, t), label(i, t + 1), net.holdover_capacity(i), ArcKind::Holdover, -1, i,
                        t, t + 1});
    }
  }

  // Several supplies at one copy share a single super arc.
  std::sort(sources.begin(), sources.end(),
            [](const SourceSupply& a, const SourceSupply& b) { return std::pair(a.t, a.node) < std::pair(b.t, b.node); });
  for (std::size_t k = 0; k < sources.size();) {
    std::int64_t total = 0;
    std::size_t j = k;
    while (j < sources.size() && sources[j].node == sources[k].node && sources[j].t == sources[k].t) {
      total += sources[j++].supply;
    }
    const Label l = label(sources[k].node, sources[k].t);
    w.sources.push_back(l);
    w.arcs.push_back({ten::kSuperSource, l, total, ArcKind::Super, -1, sources[k].node, sources[k].t, sources[k].t});
    k = j;
  }

  for (int d : sinks) {
    if (w.t_max[d] < 0) continue;
    const Label l = label(d, w.t_max[d]);
    const std::int64_t cap = options.sink_capacity.empty() ? net.nodes[d].demand : options.sink_capacity[d];
    w.sinks.push_back(l);
    w.arcs.push_back({l, ten::kSuperSink, std::max<std::int64_t>(0, cap), ArcKind::Super, -1, d, w.t_max[d],
                      w.t_max[d]});
  }

  std::sort(w.arcs.begin(), w.arcs.end(), ten::arc_less);
  std::sort(w.sources.begin(), w.sources.end());
  std::sort(w.sinks.begin(), w.sinks.end());
  return w;
}

}  // namespace evac::wten
