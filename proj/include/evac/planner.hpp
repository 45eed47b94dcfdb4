#pragma once

// Evacuation planning: the horizon search for an initial plan and the
// replanning step applied when the fire forecast changes mid-evacuation.

#include "evac/fire.hpp"
#include "evac/maxflow.hpp"
#include "evac/roadnet.hpp"
#include "evac/ten.hpp"
#include "evac/wten.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace evac::planner {

using ten::ExpandedArc;
using ten::Label;

/// An expanded arc (global labels and instances) carrying positive flow.
struct PlanFlow {
  ExpandedArc arc;
  std::int64_t flow = 0;

  friend bool operator==(const PlanFlow&, const PlanFlow&) = default;
};

/// Canonical plan order: (depart_t, from, to, kind).
bool plan_flow_less(const PlanFlow& a, const PlanFlow& b);

struct PhaseTimings {
  double fire_s = 0.0;
  double wten_s = 0.0;
  double maxflow_s = 0.0;
  double total_s = 0.0;
};

struct NetworkSizes {
  std::int64_t base_nodes = 0;
  std::int64_t base_arcs = 0;
  std::int64_t wten_nodes = 0;
  std::int64_t wten_arcs = 0;
};

struct EvacuationPlan {
  int horizon = 0;  // T_sol
  double dt_seconds = 60.0;
  std::vector<PlanFlow> flows;  // canonical order
  maxflow::RouteBundle routes;  // routes ending at the super sink
  std::int64_t evacuated = 0;
  std::int64_t stranded = 0;
  std::int64_t total_supply = 0;
  bool complete = false;
  fire::FireScenario scenario;  // the scenario this plan was computed against
  std::string scenario_fingerprint;
  int iterations = 0;  // horizons solved
  PhaseTimings timings;
  NetworkSizes sizes;
};

struct UpdateRequest {
  int t_reopt = 1;
  int t_fire = 1;
  fire::FireScenario new_scenario;
};

struct PlanOptions {
  bool holdover_all_nodes = false;
};

/// Horizon search: starts at initial_horizon(net) and grows T until everyone
/// is evacuated, T exceeds t_max, or the value has not improved for
/// sum(travel times) consecutive horizons. The returned horizon is the
/// smallest one achieving the plan's value.
EvacuationPlan plan_initial(const roadnet::DynamicNetwork& net, const fire::FireScenario& scenario, int t_max,
                            const PlanOptions& options = {});

/// Supplies at node copies reached at or after t_reopt by flow that departed
/// before it. With t_reopt = 0 these are the network's own sources.
std::vector<wten::SourceSupply> derive_new_sources(const wten::Wten& w, const maxflow::FlowSolution& sol,
                                                   int t_reopt);
/// Same rule over plan flows (global labels); super and stranded arcs never count.
std::vector<wten::SourceSupply> derive_new_sources(const std::vector<PlanFlow>& flows, int t_reopt, int n);

/// Replans from t_reopt against the old fire combined with `req.new_scenario`
/// from t_fire on. Flows departing before t_reopt are copied unchanged.
EvacuationPlan plan_update(const roadnet::DynamicNetwork& net, const EvacuationPlan& prev, const UpdateRequest& req,
                           int t_max, const PlanOptions& options = {});

/// Plan flows from a solved network (zero flows dropped, canonical order).
std::vector<PlanFlow> collect_flows(const wten::Wten& w, const maxflow::FlowSolution& sol);

/// Feasibility of a plan's flows taken as one network (capacity and conservation).
std::optional<std::string> find_plan_violation(const EvacuationPlan& plan);

/// Recomputes evacuated / stranded / complete / routes from the flows.
void finalize(EvacuationPlan& plan);

}  // namespace evac::planner
