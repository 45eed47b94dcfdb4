#pragma once

// Shared builders and random generators for the test binaries.

#include "evac/fire.hpp"
#include "evac/roadnet.hpp"
#include "evac/ten.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef EVAC_TEST_DATA
#define EVAC_TEST_DATA "tests/data"
#endif

namespace evac::tk {

using geometry::Point;

struct ArcSpec {
  int from = 0;
  int to = 0;
  int lambda = 1;
  std::int64_t capacity = 1;
};

// Nodes get ids "1".."n"; roads are straight segments between node points.
inline roadnet::DynamicNetwork make_net(const std::vector<Point>& points, const std::vector<ArcSpec>& arcs,
                                        const std::vector<std::int64_t>& supply,
                                        const std::vector<std::int64_t>& demand) {
  roadnet::DynamicNetwork net;
  for (std::size_t k = 0; k < points.size(); ++k) {
    roadnet::Node node;
    node.id = std::to_string(k + 1);
    node.point = points[k];
    node.supply = k < supply.size() ? supply[k] : 0;
    node.demand = k < demand.size() ? demand[k] : 0;
    net.nodes.push_back(node);
  }
  for (const auto& a : arcs) {
    roadnet::Arc arc;
    arc.from = a.from;
    arc.to = a.to;
    arc.travel_time = a.lambda;
    arc.capacity = a.capacity;
    arc.geometry = geometry::Polyline({points[a.from], points[a.to]});
    arc.name = "r" + std::to_string(a.from + 1) + "-" + std::to_string(a.to + 1);
    net.arcs.push_back(arc);
  }
  return net;
}

// Three-node triangle: 1->2 and 1->3 take one
// instance, 2->3 takes two. Node 1 is the source, node 3 the sink.
inline roadnet::DynamicNetwork triangle_network() {
  return make_net({{0, 0}, {2000, 0}, {2000, 2000}}, {{0, 1, 1, 5}, {0, 2, 1, 5}, {1, 2, 2, 5}}, {10, 0, 0},
                  {0, 0, 10});
}

// A circle 10 m west of node 1 with r0 = 8 reaches it at t = 2.
inline fire::FireScenario triangle_fire() { return fire::FireScenario::circles({{{-10, 0}, 8.0, 1.0}}); }

// No circles at all: covers every instance and never burns anything.
inline fire::FireScenario no_fire() { return fire::FireScenario::circles({}); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string data_path(const std::string& name) { return std::string(EVAC_TEST_DATA) + "/" + name; }

struct RandomNetSpec {
  int nodes = 8;
  int extra_arcs = 6;
  int max_lambda = 3;
  std::int64_t max_capacity = 6;
  int sources = 2;
  int sinks = 1;
  std::int64_t max_supply = 10;
  double extent_m = 400.0;
};

// Weakly connected random network: a random spanning tree (both directions)
// plus extra directed arcs. Sources and sinks are distinct nodes.
template <class Rng>
roadnet::DynamicNetwork random_network(Rng& rng, const RandomNetSpec& spec) {
  const int n = spec.nodes;
  std::uniform_real_distribution<double> coord(0.0, spec.extent_m);
  std::uniform_int_distribution<int> lam(1, spec.max_lambda);
  std::uniform_int_distribution<std::int64_t> cap(0, spec.max_capacity);
  std::vector<Point> pts;
  for (int k = 0; k < n; ++k) pts.push_back({coord(rng), coord(rng)});
  for (int k = 1; k < n; ++k) {
    // Keep points distinct so every road has a proper segment.
    while (pts[k] == pts[k - 1]) pts[k] = {coord(rng), coord(rng)};
  }
  std::vector<ArcSpec> arcs;
  std::vector<std::pair<int, int>> seen;
  auto add = [&](int u, int v) {
    if (u == v) return;
    for (auto& p : seen) {
      if (p == std::pair(u, v)) return;
    }
    seen.emplace_back(u, v);
    arcs.push_back({u, v, lam(rng), cap(rng)});
  };
  for (int k = 1; k < n; ++k) {
    const int parent = std::uniform_int_distribution<int>(0, k - 1)(rng);
    add(parent, k);
    add(k, parent);
  }
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int e = 0; e < spec.extra_arcs; ++e) add(pick(rng), pick(rng));

  std::vector<int> order(n);
  for (int k = 0; k < n; ++k) order[k] = k;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::int64_t> supply(n, 0);
  std::vector<std::int64_t> demand(n, 0);
  std::uniform_int_distribution<std::int64_t> sup(1, spec.max_supply);
  int k = 0;
  for (int s = 0; s < spec.sources && k < n; ++s) supply[order[k++]] = sup(rng);
  for (int d = 0; d < spec.sinks && k < n; ++d) demand[order[k++]] = spec.max_supply * spec.sources;
  return make_net(pts, arcs, supply, demand);
}

// One to three growing circles inside (or near) the network's extent.
template <class Rng>
fire::FireScenario random_circles(Rng& rng, double extent_m, double max_growth = 30.0) {
  std::uniform_real_distribution<double> coord(-0.25 * extent_m, 1.25 * extent_m);
  std::uniform_real_distribution<double> r0(1.0, 0.3 * extent_m);
  std::uniform_real_distribution<double> growth(0.0, max_growth);
  std::vector<fire::GrowingCircle> circles;
  const int count = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int k = 0; k < count; ++k) circles.push_back({{coord(rng), coord(rng)}, r0(rng), growth(rng)});
  return fire::FireScenario::circles(std::move(circles));
}

}  // namespace evac::tk
