#pragma once

// Maximum flow on the expanded network and route decomposition.

#include "evac/ten.hpp"
#include "evac/wten.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evac::maxflow {

using ten::ExpandedArc;
using ten::Label;

struct FlowSolution {
  std::int64_t value = 0;
  std::vector<std::int64_t> arc_flow;  // aligned with the network's arc list
};

struct Route {
  std::vector<Label> path;  // super source ... terminal
  std::int64_t amount = 0;
};

struct RouteBundle {
  std::vector<Route> routes;
  std::int64_t total() const;
};

/// Dense single-source single-sink problem the solvers run on.
struct FlowProblem {
  int node_count = 0;
  int source = 0;
  int sink = 0;
  std::vector<int> tail;
  std::vector<int> head;
  std::vector<std::int64_t> capacity;
};

/// Maps a Wten onto dense indices; label order gives adjacency order.
FlowProblem to_problem(const wten::Wten& w);

/// Dinic's blocking-flow algorithm, optionally continuing from a feasible
/// flow `initial` (one value per arc).
FlowSolution dinic(const FlowProblem& problem, std::span<const std::int64_t> initial = {});
/// Edmonds-Karp (BFS augmenting paths). Kept as an independent cross-check.
FlowSolution edmonds_karp(const FlowProblem& problem);

FlowSolution solve_dinic(const wten::Wten& w, std::span<const std::int64_t> initial = {});
FlowSolution solve_reference(const wten::Wten& w);

/// First violated constraint, if any: capacity bounds, integrality is implied,
/// and conservation at every ordinary (positive) label.
std::optional<std::string> find_violation(std::span<const ExpandedArc> arcs,
                                          std::span<const std::int64_t> flow);

/// Peels source-to-terminal paths off a feasible flow on a time-ordered
/// network, always following the smallest next label. Any non-positive label
/// other than the super source is a terminal. Throws InputError if the flow
/// is infeasible.
RouteBundle decompose_flows(std::span<const ExpandedArc> arcs, std::span<const std::int64_t> flow);

RouteBundle decompose(const wten::Wten& w, const FlowSolution& sol);

}  // namespace evac::maxflow
