#include "evac/roadnet.hpp"

#include "evac/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <tuple>
#include <unordered_map>

namespace evac::roadnet {

namespace {

using nlohmann::json;

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw InputError("node id must be a string or integer");
}

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw InputError(where + ": missing field '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw InputError(where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T optional_field(const json& obj, const char* key, T fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw InputError(where + ": field '" + key + "' has the wrong type");
  }
}

// Keeps the most permissive of two parallel arcs: max capacity, min travel time.
void absorb_parallel(Arc& kept, const Arc& other) {
  const bool other_better = other.capacity > kept.capacity ||
                            (other.capacity == kept.capacity && other.travel_time < kept.travel_time);
  const int travel = std::min(kept.travel_time, other.travel_time);
  const std::int64_t cap = std::max(kept.capacity, other.capacity);
  if (other_better) {
    const int from = kept.from;
    const int to = kept.to;
    kept = other;
    kept.from = from;
    kept.to = to;
  }
  kept.travel_time = travel;
  kept.capacity = cap;
}

std::vector<Arc> merge_parallel(std::vector<Arc> arcs) {
  std::map<std::pair<int, int>, std::size_t> slot;
  std::vector<Arc> out;
  out.reserve(arcs.size());
  for (auto& a : arcs) {
    if (a.from == a.to) continue;
    auto [it, fresh] = slot.try_emplace({a.from, a.to}, out.size());
    if (fresh) {
      out.push_back(std::move(a));
    } else {
      absorb_parallel(out[it->second], a);
    }
  }
  return out;
}

class DisjointSets {
public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // Smaller index wins so representatives stay stable.
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

private:
  std::vector<int> parent_;
};

}  // namespace

int DynamicNetwork::find_node(const std::string& id) const {
  for (int k = 0; k < node_count(); ++k) {
    if (nodes[k].id == id) return k;
  }
  return -1;
}

std::vector<int> DynamicNetwork::sources() const {
  std::vector<int> out;
  for (int k = 0; k < node_count(); ++k) {
    if (nodes[k].is_source()) out.push_back(k);
  }
  return out;
}

std::vector<int> DynamicNetwork::sinks() const {
  std::vector<int> out;
  for (int k = 0; k < node_count(); ++k) {
    if (nodes[k].is_sink()) out.push_back(k);
  }
  return out;
}

std::int64_t DynamicNetwork::total_supply() const {
  std::int64_t total = 0;
  for (const auto& n : nodes) total += n.supply;
  return total;
}

std::int64_t DynamicNetwork::holdover_capacity(int node) const {
  const auto& n = nodes[node];
  return n.is_source() ? n.supply : n.demand;
}

std::int64_t DynamicNetwork::travel_time_sum() const {
  std::int64_t total = 0;
  for (const auto& a : arcs) total += a.travel_time;
  return total;
}

std::int64_t moore_capacity(double speed_mps, int lanes, double dt_seconds, const MooreParams& params) {
  if (!(speed_mps > 0.0) || lanes < 1) return 0;
  const double per_lane = speed_mps / (params.vehicle_length_m + speed_mps * params.reaction_time_s);
  const double people = per_lane * lanes * dt_seconds * params.occupancy;
  return static_cast<std::int64_t>(std::floor(people));
}

int round_travel_time(double seconds, double dt_seconds) {
  const double steps = std::ceil(seconds / dt_seconds);
  return std::max(1, static_cast<int>(steps));
}

DynamicNetwork load_network(const json& doc, const MooreParams& params) {
  if (!doc.is_object()) throw InputError("network document must be a JSON object");
  DynamicNetwork net;
  net.dt_seconds = optional_field<double>(doc, "dt_seconds", 60.0, "network");
  if (!(net.dt_seconds > 0.0)) throw InputError("network: dt_seconds must be positive");

  const auto nodes_it = doc.find("nodes");
  const auto edges_it = doc.find("edges");
  if (nodes_it == doc.end() || !nodes_it->is_array() || nodes_it->empty()) {
    throw InputError("network: 'nodes' must be a non-empty array");
  }
  if (edges_it == doc.end() || !edges_it->is_array()) {
    throw InputError("network: 'edges' must be an array");
  }

  struct Raw {
    double lat, lon;
  };
  std::vector<Raw> raw;
  std::unordered_map<std::string, int> index;
  for (const auto& jn : *nodes_it) {
    if (!jn.is_object() || !jn.contains("id")) throw InputError("network: node without id");
    Node node;
    node.id = id_string(jn.at("id"));
    const std::string where = "node " + node.id;
    const double lat = required<double>(jn, "lat", where);
    const double lon = required<double>(jn, "lon", where);
    node.supply = optional_field<std::int64_t>(jn, "supply", 0, where);
    node.demand = optional_field<std::int64_t>(jn, "demand", 0, where);
    if (node.supply < 0 || node.demand < 0) throw InputError(where + ": negative supply or demand");
    if (node.supply > 0 && node.demand > 0) {
      throw InputError(where + ": a node cannot be both source and sink");
    }
    if (!index.emplace(node.id, net.node_count()).second) {
      throw InputError("network: duplicate node id " + node.id);
    }
    raw.push_back({lat, lon});
    net.nodes.push_back(std::move(node));
  }

  double lat_sum = 0.0;
  double lon_sum = 0.0;
  for (const auto& r : raw) {
    lat_sum += r.lat;
    lon_sum += r.lon;
  }
  net.origin = {lat_sum / static_cast<double>(raw.size()), lon_sum / static_cast<double>(raw.size())};
  for (std::size_t k = 0; k < raw.size(); ++k) {
    net.nodes[k].point = geometry::project(raw[k].lat, raw[k].lon, net.origin);
  }

  std::vector<Arc> arcs;
  for (const auto& je : *edges_it) {
    if (!je.is_object()) throw InputError("network: edge must be an object");
    const std::string u = je.contains("u") ? id_string(je.at("u")) : throw InputError("edge: missing field 'u'");
    const std::string v = je.contains("v") ? id_string(je.at("v")) : throw InputError("edge: missing field 'v'");
    const std::string where = "edge " + u + "->" + v;
    const auto iu = index.find(u);
    const auto iv = index.find(v);
    if (iu == index.end()) throw InputError(where + ": missing node " + u);
    if (iv == index.end()) throw InputError(where + ": missing node " + v);
    if (iu->second == iv->second) continue;

    Arc arc;
    arc.from = iu->second;
    arc.to = iv->second;
    arc.name = optional_field<std::string>(je, "name", "", where);
    arc.speed_mps = required<double>(je, "speed_mps", where);
    if (!(arc.speed_mps > 0.0)) throw InputError(where + ": speed_mps must be positive");
    arc.lanes = optional_field<int>(je, "lanes", 1, where);
    if (arc.lanes < 1) throw InputError(where + ": lanes must be >= 1");
    const bool oneway = optional_field<bool>(je, "oneway", false, where);

    std::vector<Point> pts;
    if (auto g = je.find("geometry"); g != je.end() && !g->is_null()) {
      if (!g->is_array()) throw InputError(where + ": geometry must be an array of [lat, lon]");
      for (const auto& ll : *g) {
        if (!ll.is_array() || ll.size() != 2) throw InputError(where + ": geometry vertex must be [lat, lon]");
        pts.push_back(geometry::project(ll[0].get<double>(), ll[1].get<double>(), net.origin));
      }
    }
    if (pts.size() < 2) pts = {net.nodes[arc.from].point, net.nodes[arc.to].point};
    arc.geometry = Polyline(std::move(pts));
    arc.travel_time = round_travel_time(arc.geometry.length() / arc.speed_mps, net.dt_seconds);
    arc.capacity = moore_capacity(arc.speed_mps, arc.lanes, net.dt_seconds, params);

    if (!oneway) {
      Arc back = arc;
      std::swap(back.from, back.to);
      back.geometry = arc.geometry.reversed();
      arcs.push_back(std::move(arc));
      arcs.push_back(std::move(back));
    } else {
      arcs.push_back(std::move(arc));
    }
  }
  net.arcs = merge_parallel(std::move(arcs));
  check_connected(net);
  return net;
}

DynamicNetwork load_network_file(const std::filesystem::path& path, const MooreParams& params) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open network file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("network file " + path.string() + " is not valid JSON: " + e.what());
  }
  return load_network(doc, params);
}

void check_connected(const DynamicNetwork& net) {
  const int n = net.node_count();
  if (n == 0) throw InputError("network has no nodes");
  DisjointSets sets(n);
  for (const auto& a : net.arcs) sets.unite(a.from, a.to);
  for (int k = 1; k < n; ++k) {
    if (sets.find(k) != sets.find(0)) {
      throw InputError("network is disconnected: node " + net.nodes[k].id +
                       " cannot reach node " + net.nodes[0].id);
    }
  }
}

DynamicNetwork contract(const DynamicNetwork& net, double tolerance_m) {
  if (!(tolerance_m >= 0.0)) throw InputError("tolerance must be >= 0");
  const int n = net.node_count();
  if (tolerance_m == 0.0 || n < 2) return net;

  // Each group keeps its members so the centroid is always the mean of the
  // original positions.
  struct Group {
    std::vector<int> members;
    Point centroid;
    std::int64_t supply = 0;
    std::int64_t demand = 0;
  };
  std::vector<Group> groups;
  groups.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    groups.push_back({{k}, net.nodes[k].point, net.nodes[k].supply, net.nodes[k].demand});
  }
  std::vector<int> alive(static_cast<std::size_t>(n));
  std::iota(alive.begin(), alive.end(), 0);

  while (true) {
    // Candidate pairs via a uniform grid with cell size = tolerance.
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<int>> grid;
    auto cell_of = [&](const Point& p) {
      return std::pair{static_cast<std::int64_t>(std::floor(p.x / tolerance_m)),
                       static_cast<std::int64_t>(std::floor(p.y / tolerance_m))};
    };
    for (int g : alive) grid[cell_of(groups[g].centroid)].push_back(g);

    std::vector<std::tuple<double, int, int>> pairs;
    for (int g : alive) {
      const auto [cx, cy] = cell_of(groups[g].centroid);
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          auto it = grid.find({cx + dx, cy + dy});
          if (it == grid.end()) continue;
          for (int h : it->second) {
            if (h <= g) continue;
            const double d = geometry::distance(groups[g].centroid, groups[h].centroid);
            if (d < tolerance_m) pairs.emplace_back(d, g, h);
          }
        }
      }
    }
    if (pairs.empty()) break;
    std::sort(pairs.begin(), pairs.end());

    std::vector<char> touched(static_cast<std::size_t>(n), 0);
    for (const auto& [d, g, h] : pairs) {
      if (touched[g] || touched[h]) continue;
      touched[g] = touched[h] = 1;
      Group& keep = groups[g];
      Group& gone = groups[h];
      if ((keep.supply > 0 && gone.demand > 0) || (keep.demand > 0 && gone.supply > 0)) {
        throw InputError("source/sink collision: contracting node " + net.nodes[keep.members.front()].id +
                         " with node " + net.nodes[gone.members.front()].id);
      }
      keep.members.insert(keep.members.end(), gone.members.begin(), gone.members.end());
      keep.supply += gone.supply;
      keep.demand += gone.demand;
      Point c{0.0, 0.0};
      for (int m : keep.members) {
        c.x += net.nodes[m].point.x;
        c.y += net.nodes[m].point.y;
      }
      keep.centroid = {c.x / static_cast<double>(keep.members.size()),
                       c.y / static_cast<double>(keep.members.size())};
      gone.members.clear();
    }
    std::erase_if(alive, [&](int g) { return groups[g].members.empty(); });
  }

  DynamicNetwork out;
  out.dt_seconds = net.dt_seconds;
  out.origin = net.origin;
  std::vector<int> new_index(static_cast<std::size_t>(n), -1);
  for (int g : alive) {
    auto& grp = groups[g];
    std::sort(grp.members.begin(), grp.members.end());
    Node node = net.nodes[grp.members.front()];
    node.point = grp.centroid;
    node.supply = grp.supply;
    node.demand = grp.demand;
    for (int m : grp.members) new_index[m] = out.node_count();
    out.nodes.push_back(std::move(node));
  }
  std::vector<Arc> arcs;
  arcs.reserve(net.arcs.size());
  for (const auto& a : net.arcs) {
    Arc c = a;
    c.from = new_index[a.from];
    c.to = new_index[a.to];
    arcs.push_back(std::move(c));
  }
  out.arcs = merge_parallel(std::move(arcs));
  return out;
}

namespace {

struct Reach {
  std::int64_t time = std::numeric_limits<std::int64_t>::max();
  int hops = 0;
};

// Reverse multi-source Dijkstra from every sink, ordered by (time, hops).
std::vector<Reach> nearest_sink(const DynamicNetwork& net) {
  const int n = net.node_count();
  std::vector<std::vector<int>> incoming(static_cast<std::size_t>(n));
  for (int k = 0; k < net.arc_count(); ++k) incoming[net.arcs[k].to].push_back(k);

  std::vector<Reach> best(static_cast<std::size_t>(n));
  using Entry = std::tuple<std::int64_t, int, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (int d : net.sinks()) {
    best[d] = {0, 0};
    queue.emplace(0, 0, d);
  }
  while (!queue.empty()) {
    const auto [time, hops, node] = queue.top();
    queue.pop();
    if (std::pair(time, hops) != std::pair(best[node].time, best[node].hops)) continue;
    for (int k : incoming[node]) {
      const auto& arc = net.arcs[k];
      const Reach cand{time + arc.travel_time, hops + 1};
      auto& cur = best[arc.from];
      if (std::pair(cand.time, cand.hops) < std::pair(cur.time, cur.hops)) {
        cur = cand;
        queue.emplace(cand.time, cand.hops, arc.from);
      }
    }
  }
  return best;
}

Reach farthest_source(const DynamicNetwork& net) {
  const auto reach = nearest_sink(net);
  Reach worst{0, 0};
  for (int s : net.sources()) {
    if (reach[s].time == std::numeric_limits<std::int64_t>::max()) {
      throw InputError("infeasible source: node " + net.nodes[s].id + " cannot reach any sink");
    }
    if (reach[s].time > worst.time) worst = reach[s];
  }
  return worst;
}

}  // namespace

int initial_horizon(const DynamicNetwork& net) {
  const Reach r = farthest_source(net);
  return static_cast<int>(r.time) + r.hops;
}

int shortest_evacuation_bound(const DynamicNetwork& net) {
  return static_cast<int>(farthest_source(net).time);
}

}  // namespace evac::roadnet
