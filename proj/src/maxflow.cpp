#include "evac/maxflow.hpp"

#include "evac/error.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>
#include <unordered_map>

namespace evac::maxflow {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

// Residual graph in CSR form. Edge 2k is arc k, edge 2k+1 its reverse.
class Residual {
public:
  // `initial` (empty, or one value per arc) is a starting flow already in place.
  Residual(const FlowProblem& p, std::span<const std::int64_t> initial) : n_(p.node_count) {
    const std::size_t m = p.tail.size();
    to_.resize(2 * m);
    cap_.resize(2 * m);
    start_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (std::size_t k = 0; k < m; ++k) {
      ++start_[p.tail[k] + 1];
      ++start_[p.head[k] + 1];
    }
    for (int v = 0; v < n_; ++v) start_[v + 1] += start_[v];
    order_.resize(2 * m);
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    // Forward edges keep the problem's arc order within each node.
    for (std::size_t k = 0; k < m; ++k) {
      const std::int64_t f = initial.empty() ? 0 : initial[k];
      to_[2 * k] = p.head[k];
      cap_[2 * k] = p.capacity[k] - f;
      to_[2 * k + 1] = p.tail[k];
      cap_[2 * k + 1] = f;
      order_[fill[p.tail[k]]++] = static_cast<int>(2 * k);
      order_[fill[p.head[k]]++] = static_cast<int>(2 * k + 1);
    }
    original_.resize(m);
    for (std::size_t k = 0; k < m; ++k) original_[k] = p.capacity[k];
  }

  int nodes() const { return n_; }
  int begin(int v) const { return start_[v]; }
  int end(int v) const { return start_[v + 1]; }
  int edge_at(int pos) const { return order_[pos]; }
  int to(int e) const { return to_[e]; }
  std::int64_t cap(int e) const { return cap_[e]; }
  void push(int e, std::int64_t amount) {
    cap_[e] -= amount;
    cap_[e ^ 1] += amount;
  }

  FlowSolution extract(std::size_t arc_count, int source) const {
    FlowSolution sol;
    sol.arc_flow.resize(arc_count);
    for (std::size_t k = 0; k < arc_count; ++k) sol.arc_flow[k] = original_[k] - cap_[2 * k];
    for (int pos = begin(source); pos < end(source); ++pos) {
      const int e = edge_at(pos);
      if ((e & 1) == 0) sol.value += sol.arc_flow[static_cast<std::size_t>(e / 2)];
      else sol.value -= sol.arc_flow[static_cast<std::size_t>(e / 2)];
    }
    return sol;
  }

private:
  int n_;
  std::vector<int> start_;
  std::vector<int> order_;
  std::vector<int> to_;
  std::vector<std::int64_t> cap_;
  std::vector<std::int64_t> original_;
};

void check_problem(const FlowProblem& p) {
  if (p.tail.size() != p.head.size() || p.tail.size() != p.capacity.size()) {
    throw InputError("flow problem arrays differ in length");
  }
  for (std::size_t k = 0; k < p.tail.size(); ++k) {
    if (p.capacity[k] < 0) throw InputError("negative arc capacity");
  }
}

class DinicSolver {
public:
  explicit DinicSolver(Residual& g) : g_(g), level_(g.nodes()), next_(g.nodes()) {}

  void run(int s, int t) {
    if (s == t) return;
    while (bfs(s, t)) {
      for (int v = 0; v < g_.nodes(); ++v) next_[v] = g_.begin(v);
      augment(s, t, kInf);
    }
  }

private:
  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    queue_.clear();
    level_[s] = 0;
    queue_.push_back(s);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const int v = queue_[head];
      // Nothing past the sink's level can be on a shortest augmenting path.
      if (level_[t] >= 0 && level_[v] >= level_[t]) break;
      for (int pos = g_.begin(v); pos < g_.end(v); ++pos) {
        const int e = g_.edge_at(pos);
        const int w = g_.to(e);
        if (g_.cap(e) > 0 && level_[w] < 0) {
          level_[w] = level_[v] + 1;
          queue_.push_back(w);
        }
      }
    }
    return level_[t] >= 0;
  }

  // Pushes up to `limit` from v towards t along the level graph. Nodes that
  // cannot pass anything on are cut out of this phase.
  std::int64_t augment(int v, int t, std::int64_t limit) {
    if (v == t) return limit;
    std::int64_t sent = 0;
    for (int& pos = next_[v]; pos < g_.end(v); ++pos) {
      const int e = g_.edge_at(pos);
      const int w = g_.to(e);
      if (g_.cap(e) <= 0 || level_[w] != level_[v] + 1) continue;
      const std::int64_t pushed = augment(w, t, std::min(limit - sent, g_.cap(e)));
      if (pushed > 0) {
        g_.push(e, pushed);
        sent += pushed;
        if (sent == limit) return sent;
      }
    }
    level_[v] = -1;
    return sent;
  }

  Residual& g_;
  std::vector<int> level_;
  std::vector<int> next_;
  std::vector<int> queue_;
};

}  // namespace

std::int64_t RouteBundle::total() const {
  std::int64_t sum = 0;
  for (const auto& r : routes) sum += r.amount;
  return sum;
}

FlowProblem to_problem(const wten::Wten& w) {
  FlowProblem p;
  std::unordered_map<Label, int> index;
  index.reserve(w.nodes.size());
  for (Label l : w.nodes) index.emplace(l, static_cast<int>(index.size()));
  p.node_count = static_cast<int>(w.nodes.size());
  p.source = index.at(ten::kSuperSource);
  p.sink = index.at(ten::kSuperSink);
  p.tail.reserve(w.arcs.size());
  p.head.reserve(w.arcs.size());
  p.capacity.reserve(w.arcs.size());
  for (const auto& a : w.arcs) {
    p.tail.push_back(index.at(a.from));
    p.head.push_back(index.at(a.to));
    p.capacity.push_back(a.capacity);
  }
  return p;
}

FlowSolution dinic(const FlowProblem& problem, std::span<const std::int64_t> initial) {
  check_problem(problem);
  if (!initial.empty()) {
    if (initial.size() != problem.tail.size()) throw InputError("initial flow length differs from arc count");
    for (std::size_t k = 0; k < initial.size(); ++k) {
      if (initial[k] < 0 || initial[k] > problem.capacity[k]) throw InputError("initial flow exceeds a capacity");
    }
  }
  Residual g(problem, initial);
  DinicSolver(g).run(problem.source, problem.sink);
  return g.extract(problem.tail.size(), problem.source);
}

FlowSolution edmonds_karp(const FlowProblem& problem) {
  check_problem(problem);
  Residual g(problem, {});
  const int s = problem.source;
  const int t = problem.sink;
  std::vector<int> via(static_cast<std::size_t>(g.nodes()));
  while (s != t) {
    std::fill(via.begin(), via.end(), -1);
    std::queue<int> q;
    q.push(s);
    via[s] = -2;
    while (!q.empty() && via[t] == -1) {
      const int v = q.front();
      q.pop();
      for (int pos = g.begin(v); pos < g.end(v); ++pos) {
        const int e = g.edge_at(pos);
        const int w = g.to(e);
        if (g.cap(e) > 0 && via[w] == -1) {
          via[w] = e;
          q.push(w);
        }
      }
    }
    if (via[t] == -1) break;
    std::int64_t bottleneck = kInf;
    for (int v = t; v != s; v = g.to(via[v] ^ 1)) bottleneck = std::min(bottleneck, g.cap(via[v]));
    for (int v = t; v != s; v = g.to(via[v] ^ 1)) g.push(via[v], bottleneck);
  }
  return g.extract(problem.tail.size(), s);
}

FlowSolution solve_dinic(const wten::Wten& w, std::span<const std::int64_t> initial) {
  if (!initial.empty()) {
    if (auto v = find_violation(w.arcs, initial)) throw InputError("initial flow is infeasible: " + *v);
  }
  return dinic(to_problem(w), initial);
}

FlowSolution solve_reference(const wten::Wten& w) { return edmonds_karp(to_problem(w)); }

std::optional<std::string> find_violation(std::span<const ExpandedArc> arcs, std::span<const std::int64_t> flow) {
  if (arcs.size() != flow.size()) return "flow vector length differs from arc count";
  std::unordered_map<Label, std::int64_t> balance;
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const auto& a = arcs[k];
    if (flow[k] < 0 || flow[k] > a.capacity) {
      return "capacity violated on arc " + std::to_string(a.from) + "->" + std::to_string(a.to) + " (flow " +
             std::to_string(flow[k]) + ", capacity " + std::to_string(a.capacity) + ")";
    }
    balance[a.from] -= flow[k];
    balance[a.to] += flow[k];
  }
  std::vector<Label> broken;
  for (const auto& [label, net] : balance) {
    if (label > 0 && net != 0) broken.push_back(label);
  }
  if (!broken.empty()) {
    const Label worst = *std::min_element(broken.begin(), broken.end());
    return "conservation violated at label " + std::to_string(worst) + " (imbalance " +
           std::to_string(balance[worst]) + ")";
  }
  return std::nullopt;
}

RouteBundle decompose_flows(std::span<const ExpandedArc> arcs, std::span<const std::int64_t> flow) {
  if (auto v = find_violation(arcs, flow)) throw InputError("cannot decompose infeasible flow: " + *v);

  std::unordered_map<Label, std::vector<int>> out;
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    if (flow[k] > 0) out[arcs[k].from].push_back(static_cast<int>(k));
  }
  for (auto& [label, list] : out) {
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      return std::tuple(arcs[a].to, arcs[a].kind, a) < std::tuple(arcs[b].to, arcs[b].kind, b);
    });
  }
  std::vector<std::int64_t> left(flow.begin(), flow.end());
  // Per-node cursor: arcs before it are exhausted.
  std::unordered_map<Label, std::size_t> cursor;
  auto next_arc = [&](Label v) -> int {
    auto it = out.find(v);
    if (it == out.end()) return -1;
    auto& pos = cursor[v];
    while (pos < it->second.size() && left[it->second[pos]] == 0) ++pos;
    return pos < it->second.size() ? it->second[pos] : -1;
  };

  RouteBundle bundle;
  std::vector<int> used;
  while (true) {
    used.clear();
    Label v = ten::kSuperSource;
    Route route;
    route.path.push_back(v);
    std::int64_t amount = std::numeric_limits<std::int64_t>::max();
    while (v > 0 || v == ten::kSuperSource) {
      const int k = next_arc(v);
      if (k < 0) break;
      used.push_back(k);
      amount = std::min(amount, left[k]);
      v = arcs[k].to;
      route.path.push_back(v);
    }
    if (used.empty()) break;
    if (v > 0) throw InputError("flow decomposition hit a dead end at label " + std::to_string(v));
    for (int k : used) left[k] -= amount;
    route.amount = amount;
    bundle.routes.push_back(std::move(route));
  }
  return bundle;
}

RouteBundle decompose(const wten::Wten& w, const FlowSolution& sol) { return decompose_flows(w.arcs, sol.arc_flow); }

}  // namespace evac::maxflow
