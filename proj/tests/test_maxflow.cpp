#include "evac/error.hpp"
#include "evac/maxflow.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <map>
#include <random>

using namespace evac;
using namespace evac::maxflow;
using ten::ArcKind;

namespace {

// Minimum s-t cut by enumerating every subset of the inner nodes.
std::int64_t brute_min_cut(const FlowProblem& p) {
  std::vector<int> inner;
  for (int v = 0; v < p.node_count; ++v) {
    if (v != p.source && v != p.sink) inner.push_back(v);
  }
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::uint32_t mask = 0; mask < (1u << inner.size()); ++mask) {
    std::vector<char> side(p.node_count, 0);
    side[p.source] = 1;
    for (std::size_t k = 0; k < inner.size(); ++k) side[inner[k]] = (mask >> k) & 1;
    std::int64_t cut = 0;
    for (std::size_t k = 0; k < p.tail.size(); ++k) {
      if (side[p.tail[k]] && !side[p.head[k]]) cut += p.capacity[k];
    }
    best = std::min(best, cut);
  }
  return best;
}

FlowProblem chain(std::int64_t a, std::int64_t b) { return {3, 0, 2, {0, 1}, {1, 2}, {a, b}}; }

// Two time-disjoint routes out of one source:
// s(0) -> a(1) -> d(2) and s(0) -> s(1) -> b(2) -> d(3), with the sink held over.
wten::Wten two_path() {
  wten::Wten w;
  w.base_node_count = 4;  // s=1, a=2, b=3, d=4
  auto L = [](int i, int t) { return ten::node_label(i, t, 4); };
  w.nodes = {-1, 0, L(1, 0), L(1, 1), L(2, 1), L(3, 2), L(4, 2), L(4, 3)};
  w.arcs = {
      {0, L(1, 0), 7, ArcKind::Super, -1, 0, 0, 0},
      {L(1, 0), L(2, 1), 3, ArcKind::Movement, 0, -1, 0, 1},
      {L(1, 0), L(1, 1), 7, ArcKind::Holdover, -1, 0, 0, 1},
      {L(2, 1), L(4, 2), 3, ArcKind::Movement, 1, -1, 1, 2},
      {L(1, 1), L(3, 2), 2, ArcKind::Movement, 2, -1, 1, 2},
      {L(3, 2), L(4, 3), 4, ArcKind::Movement, 3, -1, 2, 3},
      {L(4, 2), L(4, 3), 9, ArcKind::Holdover, -1, 3, 2, 3},
      {L(4, 3), -1, 9, ArcKind::Super, -1, 3, 3, 3},
  };
  std::sort(w.arcs.begin(), w.arcs.end(), ten::arc_less);
  std::sort(w.nodes.begin(), w.nodes.end());
  return w;
}

}  // namespace

TEST(Solvers, ChainBottleneck) {
  EXPECT_EQ(dinic(chain(5, 7)).value, 5);
  EXPECT_EQ(edmonds_karp(chain(5, 7)).value, 5);
}

TEST(Solvers, ZeroCapacity) {
  EXPECT_EQ(dinic(chain(0, 0)).value, 0);
  EXPECT_EQ(edmonds_karp(chain(0, 0)).value, 0);
}

TEST(Solvers, DisconnectedSink) {
  const FlowProblem p{4, 0, 3, {0, 1}, {1, 2}, {4, 4}};
  EXPECT_EQ(dinic(p).value, 0);
  EXPECT_EQ(edmonds_karp(p).value, 0);
}

TEST(Solvers, RejectsMalformed) {
  EXPECT_THROW(dinic({2, 0, 1, {0}, {1}, {-1}}), InputError);
  EXPECT_THROW(edmonds_karp({2, 0, 1, {0}, {}, {1}}), InputError);
}

TEST(Solvers, TwoPathMatchesMinCut) {
  const auto w = two_path();
  const auto p = to_problem(w);
  EXPECT_EQ(brute_min_cut(p), 5);
  EXPECT_EQ(solve_dinic(w).value, 5);
  EXPECT_EQ(solve_reference(w).value, 5);
}

TEST(Solvers, RandomAgainstMinCut) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 12)(rng);
    const int m = std::uniform_int_distribution<int>(0, 30)(rng);
    FlowProblem p;
    p.node_count = n;
    p.source = 0;
    p.sink = n - 1;
    std::uniform_int_distribution<int> node(0, n - 1);
    std::uniform_int_distribution<std::int64_t> cap(0, 9);
    for (int k = 0; k < m; ++k) {
      p.tail.push_back(node(rng));
      p.head.push_back(node(rng));
      p.capacity.push_back(cap(rng));
    }
    const std::int64_t cut = brute_min_cut(p);
    const auto a = dinic(p);
    const auto b = edmonds_karp(p);
    EXPECT_EQ(a.value, cut);
    EXPECT_EQ(b.value, cut);
    for (std::size_t k = 0; k < p.tail.size(); ++k) {
      EXPECT_GE(a.arc_flow[k], 0);
      EXPECT_LE(a.arc_flow[k], p.capacity[k]);
    }
  }
}

TEST(Solvers, Deterministic) {
  const auto w = two_path();
  EXPECT_EQ(solve_dinic(w).arc_flow, solve_dinic(w).arc_flow);
}

TEST(Violation, DetectsCapacityAndConservation) {
  const auto w = two_path();
  auto sol = solve_dinic(w);
  EXPECT_FALSE(find_violation(w.arcs, sol.arc_flow));
  auto over = sol.arc_flow;
  over[0] = w.arcs[0].capacity + 1;
  EXPECT_TRUE(find_violation(w.arcs, over));
  auto leak = sol.arc_flow;
  for (std::size_t k = 0; k < leak.size(); ++k) {
    if (w.arcs[k].kind == ArcKind::Movement && leak[k] > 0) {
      --leak[k];
      break;
    }
  }
  const auto msg = find_violation(w.arcs, leak);
  ASSERT_TRUE(msg);
  EXPECT_NE(msg->find("conservation"), std::string::npos);
}

TEST(Decompose, ZeroFlow) {
  const auto w = two_path();
  EXPECT_TRUE(decompose_flows(w.arcs, std::vector<std::int64_t>(w.arcs.size(), 0)).routes.empty());
}

TEST(Decompose, SinglePath) {
  wten::Wten w;
  w.base_node_count = 2;
  w.nodes = {-1, 0, 1, 4};
  w.arcs = {{0, 1, 5, ArcKind::Super, -1, 0, 0, 0},
            {1, 4, 3, ArcKind::Movement, 0, -1, 0, 1},
            {4, -1, 5, ArcKind::Super, -1, 1, 1, 1}};
  const auto sol = solve_dinic(w);
  const auto b = decompose(w, sol);
  ASSERT_EQ(b.routes.size(), 1u);
  EXPECT_EQ(b.routes[0].amount, 3);
  EXPECT_EQ(b.routes[0].path, (std::vector<ten::Label>{0, 1, 4, -1}));
}

TEST(Decompose, TwoPathsSumToValue) {
  const auto w = two_path();
  const auto sol = solve_dinic(w);
  const auto b = decompose(w, sol);
  EXPECT_EQ(b.routes.size(), 2u);
  EXPECT_EQ(b.total(), sol.value);
}

TEST(Decompose, InfeasibleRejected) {
  const auto w = two_path();
  EXPECT_THROW(decompose_flows(w.arcs, std::vector<std::int64_t>(w.arcs.size(), 100)), InputError);
}

TEST(Decompose, SuperpositionOnRandomWtens) {
  std::mt19937 rng(23);
  int solved = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto net = tk::random_network(rng, {});
    const auto scenario = tk::random_circles(rng, 400.0);
    const int T = std::uniform_int_distribution<int>(1, 10)(rng);
    wten::Wten w;
    try {
      w = wten::build_wten(net, fire::build_cache(net, scenario, T), T);
    } catch (const InfeasibleError&) {
      continue;
    }
    ++solved;
    const auto sol = solve_dinic(w);
    EXPECT_EQ(sol.value, solve_reference(w).value);
    EXPECT_FALSE(find_violation(w.arcs, sol.arc_flow));
    std::int64_t into_sink = 0;
    std::int64_t supplies = 0;
    std::int64_t demands = 0;
    for (std::size_t k = 0; k < w.arcs.size(); ++k) {
      if (w.arcs[k].to == ten::kSuperSink) {
        into_sink += sol.arc_flow[k];
        demands += w.arcs[k].capacity;
      }
      if (w.arcs[k].from == ten::kSuperSource) supplies += w.arcs[k].capacity;
    }
    EXPECT_EQ(into_sink, sol.value);
    EXPECT_LE(sol.value, std::min(supplies, demands));

    const auto bundle = decompose(w, sol);
    EXPECT_LE(bundle.routes.size(), w.arcs.size());
    EXPECT_EQ(bundle.total(), sol.value);
    std::map<std::pair<ten::Label, ten::Label>, std::int64_t> rebuilt;
    for (const auto& r : bundle.routes) {
      for (std::size_t k = 1; k < r.path.size(); ++k) {
        rebuilt[{r.path[k - 1], r.path[k]}] += r.amount;
        if (k >= 2 && r.path[k] > 0) {
          EXPECT_GT(ten::decode_label(r.path[k], w.base_node_count).t,
                    ten::decode_label(r.path[k - 1], w.base_node_count).t);
        }
      }
    }
    std::map<std::pair<ten::Label, ten::Label>, std::int64_t> expected;
    for (std::size_t k = 0; k < w.arcs.size(); ++k) {
      if (sol.arc_flow[k] > 0) expected[{w.arcs[k].from, w.arcs[k].to}] += sol.arc_flow[k];
    }
    EXPECT_EQ(rebuilt, expected);
  }
  EXPECT_GT(solved, 50);
}

TEST(WarmStart, SameValueFromAnyFeasibleStart) {
  std::mt19937 rng(29);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto net = tk::random_network(rng, {});
    const int T = std::uniform_int_distribution<int>(2, 10)(rng);
    wten::Wten w;
    try {
      w = wten::build_wten(net, fire::build_cache(net, tk::random_circles(rng, 400.0), T), T);
    } catch (const InfeasibleError&) {
      continue;
    }
    const auto cold = solve_dinic(w);
    // Start from one decomposed route of the optimum: feasible but not maximal.
    std::vector<std::int64_t> start(w.arcs.size(), 0);
    const auto bundle = decompose(w, cold);
    if (!bundle.routes.empty()) {
      const auto& r = bundle.routes.front();
      for (std::size_t k = 1; k < r.path.size(); ++k) {
        for (std::size_t a = 0; a < w.arcs.size(); ++a) {
          if (w.arcs[a].from == r.path[k - 1] && w.arcs[a].to == r.path[k]) {
            start[a] += r.amount;
            break;
          }
        }
      }
    }
    const auto warm = solve_dinic(w, start);
    EXPECT_EQ(warm.value, cold.value);
    EXPECT_FALSE(find_violation(w.arcs, warm.arc_flow));
    EXPECT_EQ(solve_dinic(w, cold.arc_flow).arc_flow, cold.arc_flow);  // already maximal
    ++checked;
  }
  EXPECT_GT(checked, 30);
}

TEST(WarmStart, RejectsInfeasibleStart) {
  const auto w = two_path();
  std::vector<std::int64_t> start(w.arcs.size(), 0);
  start[0] = 1;  // leaves the source copy without going anywhere
  EXPECT_THROW(solve_dinic(w, start), InputError);
  EXPECT_THROW(dinic(chain(1, 1), std::vector<std::int64_t>{2, 0}), InputError);
}
