#include "evac/planner.hpp"

#include "evac/error.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <tuple>
#include <unordered_map>

namespace evac::planner {

namespace {

using Clock = std::chrono::steady_clock;
using ten::ArcKind;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Attempt {
  wten::Wten w;
  maxflow::FlowSolution sol;
};

// Flow of the horizon T-1 network as a starting flow for horizon T. Every arc
// of the smaller network reappears with the same capacity, except that a
// sink's terminal copy may move later; flow that ended at the old terminal
// waits on the sink's holdover arcs instead. Returns nullopt if some arc
// cannot be matched.
std::optional<std::vector<std::int64_t>> carry_forward(const wten::Wten& from, const maxflow::FlowSolution& sol,
                                                       const wten::Wten& to) {
  const int n = to.base_node_count;
  std::vector<std::int64_t> flow(to.arcs.size(), 0);
  auto find = [&](Label u, Label v, ArcKind kind) -> std::int64_t {
    ExpandedArc key;
    key.from = u;
    key.to = v;
    key.kind = kind;
    auto it = std::lower_bound(to.arcs.begin(), to.arcs.end(), key, ten::arc_less);
    if (it == to.arcs.end() || it->from != u || it->to != v || it->kind != kind) return -1;
    return it - to.arcs.begin();
  };
  auto add = [&](Label u, Label v, ArcKind kind, std::int64_t x) {
    const auto k = find(u, v, kind);
    if (k < 0) return false;
    flow[static_cast<std::size_t>(k)] += x;
    return true;
  };
  for (std::size_t k = 0; k < from.arcs.size(); ++k) {
    const std::int64_t x = sol.arc_flow[k];
    if (x == 0) continue;
    const auto& a = from.arcs[k];
    if (a.to != ten::kSuperSink) {
      if (!add(a.from, a.to, a.kind, x)) return std::nullopt;
      continue;
    }
    const auto at = ten::decode_label(a.from, n);
    const int last = to.t_max[at.node];
    if (last < at.t) return std::nullopt;
    for (int t = at.t; t < last; ++t) {
      if (!add(ten::node_label(at.node + 1, t, n), ten::node_label(at.node + 1, t + 1, n), ArcKind::Holdover, x)) {
        return std::nullopt;
      }
    }
    if (!add(ten::node_label(at.node + 1, last, n), ten::kSuperSink, ArcKind::Super, x)) return std::nullopt;
  }
  for (std::size_t k = 0; k < flow.size(); ++k) {
    if (flow[k] > to.arcs[k].capacity) return std::nullopt;
  }
  return flow;
}

// One horizon: extend the cache, build, solve. With `previous` (the attempt at
// T-1) the solver starts from that flow. Phase times accumulate into `timings`.
Attempt solve_at(const roadnet::DynamicNetwork& net, fire::FireCache& cache, int T, const wten::WtenOptions& options,
                 PhaseTimings& timings, const Attempt* previous = nullptr) {
  auto t0 = Clock::now();
  cache.extend_to(options.t_offset + T);
  timings.fire_s += seconds_since(t0);
  t0 = Clock::now();
  Attempt a{wten::build_wten(net, cache, T, options), {}};
  timings.wten_s += seconds_since(t0);
  t0 = Clock::now();
  std::optional<std::vector<std::int64_t>> warm;
  if (previous) warm = carry_forward(previous->w, previous->sol, a.w);
  a.sol = warm ? maxflow::solve_dinic(a.w, *warm) : maxflow::solve_dinic(a.w);
  timings.maxflow_s += seconds_since(t0);
  return a;
}

void record_sizes(EvacuationPlan& plan, const roadnet::DynamicNetwork& net, const wten::Wten& w) {
  plan.sizes.base_nodes = net.node_count();
  plan.sizes.base_arcs = net.arc_count();
  plan.sizes.wten_nodes = static_cast<std::int64_t>(w.nodes.size());
  plan.sizes.wten_arcs = static_cast<std::int64_t>(w.arcs.size());
}

void check_scenario(const fire::FireScenario& scenario, int t_begin, int t_max) {
  if (!scenario.covers(t_begin, t_max)) {
    throw InputError("fire scenario does not cover instances " + std::to_string(t_begin) + ".." +
                     std::to_string(t_max));
  }
  if (auto bad = fire::validate_monotone(scenario, t_max)) {
    throw InputError("fire scenario shrinks at t=" + std::to_string(*bad));
  }
}

// Boundary-crossing flow, split by whether it was already waiting at a sink.
struct Crossing {
  std::vector<wten::SourceSupply> moving;  // global instances
  std::vector<wten::SourceSupply> held;    // sink holdover chains
};

void accumulate(std::map<std::pair<int, int>, std::int64_t>& into, int node, int t, std::int64_t amount) {
  into[{t, node}] += amount;
}

std::vector<wten::SourceSupply> flatten(const std::map<std::pair<int, int>, std::int64_t>& m) {
  std::vector<wten::SourceSupply> out;
  out.reserve(m.size());
  for (const auto& [key, supply] : m) {
    if (supply > 0) out.push_back({key.second, key.first, supply});
  }
  return out;
}

bool crosses(const ExpandedArc& a, int t_reopt) {
  return (a.kind == ten::ArcKind::Movement || a.kind == ten::ArcKind::Holdover) && a.depart_t < t_reopt &&
         a.arrive_t >= t_reopt;
}

Crossing split_crossing(const std::vector<PlanFlow>& flows, int t_reopt, const roadnet::DynamicNetwork& net) {
  const int n = net.node_count();
  std::map<std::pair<int, int>, std::int64_t> moving;
  std::map<std::pair<int, int>, std::int64_t> held;
  for (const auto& f : flows) {
    if (f.flow <= 0 || !crosses(f.arc, t_reopt)) continue;
    const auto head = ten::decode_label(f.arc.to, n);
    const bool at_sink = f.arc.kind == ten::ArcKind::Holdover && net.nodes[head.node].is_sink();
    accumulate(at_sink ? held : moving, head.node, head.t, f.flow);
  }
  return {flatten(moving), flatten(held)};
}

}  // namespace

bool plan_flow_less(const PlanFlow& a, const PlanFlow& b) {
  return std::tuple(a.arc.depart_t, a.arc.from, a.arc.to, a.arc.kind) <
         std::tuple(b.arc.depart_t, b.arc.from, b.arc.to, b.arc.kind);
}

std::vector<PlanFlow> collect_flows(const wten::Wten& w, const maxflow::FlowSolution& sol) {
  std::vector<PlanFlow> out;
  for (std::size_t k = 0; k < w.arcs.size(); ++k) {
    if (sol.arc_flow[k] > 0) out.push_back({w.to_global(w.arcs[k]), sol.arc_flow[k]});
  }
  std::sort(out.begin(), out.end(), plan_flow_less);
  return out;
}

std::vector<wten::SourceSupply> derive_new_sources(const wten::Wten& w, const maxflow::FlowSolution& sol,
                                                   int t_reopt) {
  if (t_reopt == 0) {
    std::vector<wten::SourceSupply> out;
    for (const auto& a : w.arcs) {
      if (a.from == ten::kSuperSource && a.capacity > 0) out.push_back({a.base_node, a.depart_t, a.capacity});
    }
    return out;
  }
  std::map<std::pair<int, int>, std::int64_t> acc;
  for (std::size_t k = 0; k < w.arcs.size(); ++k) {
    const auto& a = w.arcs[k];
    if (sol.arc_flow[k] <= 0 || !crosses(a, t_reopt)) continue;
    const auto head = ten::decode_label(a.to, w.base_node_count);
    accumulate(acc, head.node, head.t, sol.arc_flow[k]);
  }
  return flatten(acc);
}

std::vector<wten::SourceSupply> derive_new_sources(const std::vector<PlanFlow>& flows, int t_reopt, int n) {
  if (t_reopt < 1) throw InputError("t_reopt must be >= 1 for plan flows");
  std::map<std::pair<int, int>, std::int64_t> acc;
  for (const auto& f : flows) {
    if (f.flow <= 0 || !crosses(f.arc, t_reopt)) continue;
    const auto head = ten::decode_label(f.arc.to, n);
    accumulate(acc, head.node, head.t, f.flow);
  }
  return flatten(acc);
}

EvacuationPlan plan_initial(const roadnet::DynamicNetwork& net, const fire::FireScenario& scenario, int t_max,
                            const PlanOptions& options) {
  const auto start = Clock::now();
  if (net.sinks().empty()) throw InputError("network has no sink");
  const int t_first = roadnet::initial_horizon(net);
  if (t_max < t_first) {
    throw InputError("t_max " + std::to_string(t_max) + " is below the initial horizon " + std::to_string(t_first));
  }
  EvacuationPlan plan;
  auto t0 = Clock::now();
  check_scenario(scenario, 0, t_max);
  // Every instance up to t_max is computed before the search starts.
  fire::FireCache cache(net, scenario, 0);
  cache.extend_to(t_max);
  plan.timings.fire_s += seconds_since(t0);

  plan.dt_seconds = net.dt_seconds;
  plan.total_supply = net.total_supply();
  plan.scenario = scenario;
  plan.scenario_fingerprint = fire::fingerprint(scenario);

  wten::WtenOptions wopts;
  wopts.holdover_all_nodes = options.holdover_all_nodes;

  const std::int64_t window = std::max<std::int64_t>(1, net.travel_time_sum());
  std::optional<Attempt> best;
  std::optional<Attempt> last;
  int best_T = t_first;
  std::int64_t stale = 0;
  for (int T = t_first; T <= t_max; ++T) {
    Attempt a = solve_at(net, cache, T, wopts, plan.timings, last ? &*last : nullptr);
    ++plan.iterations;
    const bool improved = !best || a.sol.value > best->sol.value;
    if (improved) {
      best = a;
      best_T = T;
      stale = 0;
    }
    last = std::move(a);
    if (!improved && ++stale >= window) break;
    if (best->sol.value == plan.total_supply) break;
  }

  // The starting horizon overshoots the shortest evacuation time, so the
  // first value found may also be reachable below it. A plan moving nobody
  // stays at the starting horizon.
  if (best_T == t_first && best->sol.value > 0) {
    for (int T = t_first - 1; T >= 0; --T) {
      Attempt a = solve_at(net, cache, T, wopts, plan.timings);
      ++plan.iterations;
      if (a.sol.value != best->sol.value) break;
      best = std::move(a);
      best_T = T;
    }
  }

  plan.horizon = best_T;
  plan.flows = collect_flows(best->w, best->sol);
  record_sizes(plan, net, best->w);
  finalize(plan);
  plan.timings.total_s = seconds_since(start);
  return plan;
}

EvacuationPlan plan_update(const roadnet::DynamicNetwork& net, const EvacuationPlan& prev, const UpdateRequest& req,
                           int t_max, const PlanOptions& options) {
  const auto start = Clock::now();
  const int t_reopt = req.t_reopt;
  if (t_reopt < 1) throw InputError("t_reopt must be >= 1");
  if (t_reopt > req.t_fire) {
    throw InputError("t_reopt " + std::to_string(t_reopt) + " is after t_fire " + std::to_string(req.t_fire));
  }
  if (req.t_fire > prev.horizon) {
    throw InputError("t_fire " + std::to_string(req.t_fire) + " is after the plan horizon " +
                     std::to_string(prev.horizon));
  }
  if (t_max < prev.horizon) throw InputError("t_max is below the previous plan horizon");
  if (!req.new_scenario.covers(req.t_fire, t_max)) {
    throw InputError("updated fire does not cover instances " + std::to_string(req.t_fire) + ".." +
                     std::to_string(t_max));
  }
  if (!prev.scenario.covers(0, t_max)) {
    throw InputError("previous fire does not cover instances 0.." + std::to_string(t_max));
  }

  const int n = net.node_count();
  EvacuationPlan plan;
  plan.dt_seconds = net.dt_seconds;
  plan.total_supply = prev.total_supply;

  auto t0 = Clock::now();
  plan.scenario = fire::merge_scenarios(prev.scenario, req.new_scenario, req.t_fire, t_max);
  check_scenario(plan.scenario, 0, t_max);
  plan.scenario_fingerprint = fire::fingerprint(plan.scenario);
  fire::FireCache cache(net, plan.scenario, t_reopt);
  cache.extend_to(t_max);
  plan.timings.fire_s += seconds_since(t0);

  std::vector<PlanFlow> prefix;
  std::vector<std::int64_t> delivered(static_cast<std::size_t>(n), 0);
  for (const auto& f : prev.flows) {
    if (f.arc.depart_t >= t_reopt) continue;
    prefix.push_back(f);
    if (f.arc.to == ten::kSuperSink) delivered[f.arc.base_node] += f.flow;
  }

  const Crossing crossing = split_crossing(prev.flows, t_reopt, net);
  std::vector<std::int64_t> held(static_cast<std::size_t>(n), 0);
  std::vector<PlanFlow> seam;
  for (const auto& h : crossing.held) {
    held[h.node] += h.supply;
    const Label l = ten::node_label(h.node + 1, h.t, n);
    seam.push_back({{l, ten::kSuperSink, h.supply, ten::ArcKind::Super, -1, h.node, h.t, h.t}, h.supply});
  }

  // Flow in transit into a copy the new fire has already reached is lost.
  std::vector<PlanFlow> stranded;
  std::vector<wten::SourceSupply> sources;
  for (const auto& s : crossing.moving) {
    if (cache.overtaken(s.t, s.node)) {
      const Label l = ten::node_label(s.node + 1, s.t, n);
      stranded.push_back({{l, ten::kStranded, s.supply, ten::ArcKind::Stranded, -1, s.node, s.t, s.t}, s.supply});
    } else {
      sources.push_back({s.node, s.t - t_reopt, s.supply});
    }
  }
  std::int64_t moving_total = 0;
  for (const auto& s : sources) moving_total += s.supply;

  wten::WtenOptions wopts;
  wopts.t_offset = t_reopt;
  wopts.sources = sources;
  wopts.holdover_all_nodes = options.holdover_all_nodes;
  wopts.sink_capacity.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    wopts.sink_capacity[i] = std::max<std::int64_t>(0, net.nodes[i].demand - held[i] - delivered[i]);
  }

  const int t_first = std::max(prev.horizon, t_reopt);
  int local_first = t_first - t_reopt;
  for (const auto& s : sources) local_first = std::max(local_first, s.t);

  const std::int64_t window = std::max<std::int64_t>(1, net.travel_time_sum());
  std::optional<Attempt> best;
  std::optional<Attempt> last;
  int best_T = local_first;
  std::int64_t stale = 0;
  for (int T = local_first; T + t_reopt <= t_max; ++T) {
    Attempt a = solve_at(net, cache, T, wopts, plan.timings, last ? &*last : nullptr);
    ++plan.iterations;
    const bool improved = !best || a.sol.value > best->sol.value;
    if (improved) {
      best = a;
      best_T = T;
      stale = 0;
    }
    last = std::move(a);
    if (!improved && ++stale >= window) break;
    if (best->sol.value == moving_total) break;
  }
  if (!best) throw InputError("no horizon between the previous plan and t_max");

  plan.horizon = best_T + t_reopt;
  plan.flows = prefix;
  plan.flows.insert(plan.flows.end(), seam.begin(), seam.end());
  plan.flows.insert(plan.flows.end(), stranded.begin(), stranded.end());

  const auto& w = best->w;
  const auto& sol = best->sol;
  std::unordered_map<Label, std::int64_t> routed;
  for (std::size_t k = 0; k < w.arcs.size(); ++k) {
    const auto& a = w.arcs[k];
    if (a.from == ten::kSuperSource) {
      // The super source is not part of the stitched plan; its arcs only
      // tell how much of each new supply found a way out.
      routed[w.to_global(a.to)] += sol.arc_flow[k];
      continue;
    }
    if (sol.arc_flow[k] > 0) plan.flows.push_back({w.to_global(a), sol.arc_flow[k]});
  }
  for (const auto& s : sources) {
    const int t = s.t + t_reopt;
    const Label l = ten::node_label(s.node + 1, t, n);
    auto& r = routed[l];
    const std::int64_t taken = std::min(r, s.supply);
    r -= taken;
    const std::int64_t left = s.supply - taken;
    if (left > 0) {
      plan.flows.push_back({{l, ten::kStranded, left, ten::ArcKind::Stranded, -1, s.node, t, t}, left});
    }
  }

  // Several stranded entries at one label collapse into one arc.
  std::sort(plan.flows.begin(), plan.flows.end(), plan_flow_less);
  std::vector<PlanFlow> merged;
  for (const auto& f : plan.flows) {
    if (!merged.empty() && f.arc.kind == ten::ArcKind::Stranded && merged.back().arc.kind == ten::ArcKind::Stranded &&
        merged.back().arc.from == f.arc.from && merged.back().arc.depart_t == f.arc.depart_t) {
      merged.back().flow += f.flow;
      merged.back().arc.capacity += f.arc.capacity;
    } else {
      merged.push_back(f);
    }
  }
  plan.flows = std::move(merged);

  record_sizes(plan, net, w);
  finalize(plan);
  plan.timings.total_s = seconds_since(start);
  return plan;
}

std::optional<std::string> find_plan_violation(const EvacuationPlan& plan) {
  std::vector<ExpandedArc> arcs;
  std::vector<std::int64_t> flow;
  arcs.reserve(plan.flows.size());
  flow.reserve(plan.flows.size());
  for (const auto& f : plan.flows) {
    arcs.push_back(f.arc);
    flow.push_back(f.flow);
  }
  return maxflow::find_violation(arcs, flow);
}

void finalize(EvacuationPlan& plan) {
  std::sort(plan.flows.begin(), plan.flows.end(), plan_flow_less);
  plan.evacuated = 0;
  plan.stranded = 0;
  std::vector<ExpandedArc> arcs;
  std::vector<std::int64_t> flow;
  for (const auto& f : plan.flows) {
    if (f.arc.to == ten::kSuperSink) plan.evacuated += f.flow;
    if (f.arc.to == ten::kStranded) plan.stranded += f.flow;
    arcs.push_back(f.arc);
    flow.push_back(f.flow);
  }
  plan.complete = plan.evacuated == plan.total_supply;

  // Routes stranded by the fire are kept out of the bundle.
  plan.routes = {};
  auto bundle = maxflow::decompose_flows(arcs, flow);
  for (auto& r : bundle.routes) {
    if (r.path.back() == ten::kSuperSink) plan.routes.routes.push_back(std::move(r));
  }
}

}  // namespace evac::planner
