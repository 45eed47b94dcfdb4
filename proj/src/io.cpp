#include "evac/io.hpp"

#include "evac/error.hpp"
#include "evac/wten.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace evac::io {

namespace {

using planner::PlanFlow;
using ten::ArcKind;

template <class T>
T field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw InputError(where + ": field '" + key + "' has the wrong type");
  }
}

json dt_value(double dt) {
  if (std::floor(dt) == dt && std::abs(dt) < 1e15) return static_cast<std::int64_t>(dt);
  return dt;
}

json lonlat(const geometry::Point& p, const geometry::GeoOrigin& origin) {
  const auto g = geometry::unproject(p, origin);
  return json::array({g.lon, g.lat});
}

json polygon_coords(const std::vector<geometry::Point>& ring, const geometry::GeoOrigin& origin) {
  json coords = json::array();
  for (const auto& p : ring) coords.push_back(lonlat(p, origin));
  if (!ring.empty()) coords.push_back(lonlat(ring.front(), origin));
  return json::array({coords});
}

json history_to_json(const FireHistory& h) {
  json updates = json::array();
  for (const auto& u : h.updates) updates.push_back({{"t_fire", u.t_fire}, {"t_max", u.t_max}, {"doc", u.doc}});
  return {{"base", h.base}, {"updates", updates}};
}

FireHistory history_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("base")) throw InputError("plan: 'fire' needs a 'base' document");
  FireHistory h;
  h.base = doc.at("base");
  if (auto it = doc.find("updates"); it != doc.end()) {
    if (!it->is_array()) throw InputError("plan: fire 'updates' must be an array");
    for (const auto& u : *it) {
      h.updates.push_back({field<int>(u, "t_fire", "plan fire update"), field<int>(u, "t_max", "plan fire update"),
                           u.contains("doc") ? u.at("doc") : throw InputError("plan fire update: missing 'doc'")});
    }
  }
  return h;
}

}  // namespace

fire::FireScenario FireHistory::rebuild(const geometry::GeoOrigin& origin) const {
  auto scenario = fire::parse_scenario(base, origin);
  for (const auto& u : updates) {
    scenario = fire::merge_scenarios(scenario, fire::parse_scenario(u.doc, origin), u.t_fire, u.t_max);
  }
  return scenario;
}

json read_json_file(const std::filesystem::path& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + what + " file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(what + " file " + path.string() + " is not valid JSON: " + e.what());
  }
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

json plan_to_json(const PlanFile& file, const roadnet::DynamicNetwork& net) {
  const auto& plan = file.plan;
  json flows = json::array();
  for (const auto& f : plan.flows) {
    const auto& a = f.arc;
    json jf = {{"u", a.from},
               {"v", a.to},
               {"kind", ten::to_string(a.kind)},
               {"depart_t", a.depart_t},
               {"arrive_t", a.arrive_t},
               {"flow", f.flow},
               {"capacity", a.capacity}};
    if (a.kind == ArcKind::Movement) {
      const auto& arc = net.arcs.at(a.base_arc);
      jf["base_edge"] = {net.nodes[arc.from].id, net.nodes[arc.to].id};
    } else {
      jf["node"] = net.nodes.at(a.base_node).id;
    }
    flows.push_back(std::move(jf));
  }
  json routes = json::array();
  for (const auto& r : plan.routes.routes) routes.push_back({{"amount", r.amount}, {"steps", r.path}});
  return {{"T_sol", plan.horizon},
          {"dt_seconds", dt_value(plan.dt_seconds)},
          {"complete", plan.complete},
          {"evacuated", plan.evacuated},
          {"stranded", plan.stranded},
          {"total_supply", plan.total_supply},
          {"fingerprint", plan.scenario_fingerprint},
          {"tolerance_m", file.tolerance_m},
          {"t_max", file.t_max},
          {"network", {{"nodes", net.node_count()}, {"arcs", net.arc_count()}}},
          {"fire", history_to_json(file.fire)},
          {"flows", flows},
          {"routes", routes}};
}

PlanFile plan_from_json(const json& doc, const roadnet::DynamicNetwork& net) {
  if (!doc.is_object()) throw InputError("plan document must be a JSON object");
  const std::string where = "plan";
  PlanFile file;
  auto& plan = file.plan;
  plan.horizon = field<int>(doc, "T_sol", where);
  plan.dt_seconds = field<double>(doc, "dt_seconds", where);
  plan.complete = field<bool>(doc, "complete", where);
  plan.evacuated = field<std::int64_t>(doc, "evacuated", where);
  plan.stranded = field<std::int64_t>(doc, "stranded", where);
  plan.total_supply = field<std::int64_t>(doc, "total_supply", where);
  plan.scenario_fingerprint = field<std::string>(doc, "fingerprint", where);
  file.tolerance_m = field<double>(doc, "tolerance_m", where);
  file.t_max = field<int>(doc, "t_max", where);

  const auto& size = doc.contains("network") ? doc.at("network") : throw InputError("plan: missing 'network'");
  if (field<int>(size, "nodes", where) != net.node_count() || field<int>(size, "arcs", where) != net.arc_count()) {
    throw InputError("plan was made on a different network (node or road count differs)");
  }
  if (plan.dt_seconds != net.dt_seconds) throw InputError("plan dt_seconds differs from the network's");

  file.fire = history_from_json(doc.contains("fire") ? doc.at("fire") : throw InputError("plan: missing 'fire'"));
  plan.scenario = file.fire.rebuild(net.origin);
  if (fire::fingerprint(plan.scenario) != plan.scenario_fingerprint) {
    throw InputError("plan fire history does not match its fingerprint");
  }

  std::map<std::pair<std::string, std::string>, int> arc_index;
  for (int k = 0; k < net.arc_count(); ++k) {
    arc_index[{net.nodes[net.arcs[k].from].id, net.nodes[net.arcs[k].to].id}] = k;
  }
  const auto flows = doc.contains("flows") ? doc.at("flows") : throw InputError("plan: missing 'flows'");
  if (!flows.is_array()) throw InputError("plan: 'flows' must be an array");
  for (const auto& jf : flows) {
    const std::string fw = "plan flow";
    PlanFlow f;
    f.arc.from = field<ten::Label>(jf, "u", fw);
    f.arc.to = field<ten::Label>(jf, "v", fw);
    f.arc.kind = ten::arc_kind_from_string(field<std::string>(jf, "kind", fw));
    f.arc.depart_t = field<int>(jf, "depart_t", fw);
    f.arc.arrive_t = field<int>(jf, "arrive_t", fw);
    f.arc.capacity = field<std::int64_t>(jf, "capacity", fw);
    f.flow = field<std::int64_t>(jf, "flow", fw);
    if (f.arc.kind == ArcKind::Movement) {
      const auto ids = field<std::vector<std::string>>(jf, "base_edge", fw);
      if (ids.size() != 2) throw InputError("plan flow: base_edge must be [from, to]");
      auto it = arc_index.find({ids[0], ids[1]});
      if (it == arc_index.end()) throw InputError("plan flow: unknown road " + ids[0] + "->" + ids[1]);
      f.arc.base_arc = it->second;
    } else {
      const auto id = field<std::string>(jf, "node", fw);
      f.arc.base_node = net.find_node(id);
      if (f.arc.base_node < 0) throw InputError("plan flow: unknown node " + id);
    }
    plan.flows.push_back(f);
  }
  if (!std::is_sorted(plan.flows.begin(), plan.flows.end(), planner::plan_flow_less)) {
    throw InputError("plan flows are not in canonical order");
  }
  if (auto v = planner::find_plan_violation(plan)) throw InputError("plan flows are infeasible: " + *v);

  if (auto it = doc.find("routes"); it != doc.end()) {
    for (const auto& jr : *it) {
      plan.routes.routes.push_back(
          {field<std::vector<ten::Label>>(jr, "steps", "plan route"), field<std::int64_t>(jr, "amount", "plan route")});
    }
  }
  return file;
}

roadnet::DynamicNetwork load_contracted(const std::filesystem::path& path, double tolerance_m) {
  return load_contracted(read_json_file(path, "network"), tolerance_m);
}

roadnet::DynamicNetwork load_contracted(const json& network_doc, double tolerance_m) {
  auto net = roadnet::contract(roadnet::load_network(network_doc), tolerance_m);
  roadnet::check_connected(net);
  return net;
}

double plan_tolerance(const json& plan_doc) {
  if (!plan_doc.is_object() || !plan_doc.contains("tolerance_m") || !plan_doc.at("tolerance_m").is_number()) {
    throw InputError("plan has no numeric tolerance_m");
  }
  return plan_doc.at("tolerance_m").get<double>();
}

PlanFile make_plan(const roadnet::DynamicNetwork& net, const json& fire_doc, double tolerance_m, int t_max,
                   const planner::PlanOptions& options) {
  PlanFile file;
  file.fire.base = fire_doc;
  file.tolerance_m = tolerance_m;
  file.t_max = t_max;
  file.plan = planner::plan_initial(net, file.fire.rebuild(net.origin), t_max, options);
  return file;
}

PlanFile make_update(const roadnet::DynamicNetwork& net, const PlanFile& prev, const json& update_doc, int t_reopt,
                     int t_fire, int t_max, const planner::PlanOptions& options) {
  if (t_fire < 0) {
    if (!update_doc.is_object() || !update_doc.contains("t_fire") || !update_doc.at("t_fire").is_number_integer()) {
      throw InputError("fire update needs an integer 't_fire'");
    }
    t_fire = update_doc.at("t_fire").get<int>();
  }
  if (t_max < 0) t_max = prev.t_max;

  planner::UpdateRequest req;
  req.t_reopt = t_reopt;
  req.t_fire = t_fire;
  req.new_scenario = fire::parse_scenario(update_doc, net.origin);

  PlanFile file;
  file.tolerance_m = prev.tolerance_m;
  file.t_max = t_max;
  file.fire = prev.fire;
  file.fire.updates.push_back({t_fire, t_max, update_doc});
  file.plan = planner::plan_update(net, prev.plan, req, t_max, options);
  return file;
}

json export_geojson(const PlanFile& file, const roadnet::DynamicNetwork& net, int t_from, int t_to) {
  const auto& plan = file.plan;
  if (t_from < 0 || t_to > plan.horizon || t_from > t_to) {
    throw InputError("instance range [" + std::to_string(t_from) + ", " + std::to_string(t_to) +
                     "] is outside the plan horizon [0, " + std::to_string(plan.horizon) + "]");
  }
  const int span = t_to - t_from + 1;
  std::vector<std::vector<std::int64_t>> per_t(static_cast<std::size_t>(net.arc_count()),
                                               std::vector<std::int64_t>(static_cast<std::size_t>(span), 0));
  for (const auto& f : plan.flows) {
    if (f.arc.kind != ArcKind::Movement || f.arc.depart_t < t_from || f.arc.depart_t > t_to) continue;
    per_t[f.arc.base_arc][f.arc.depart_t - t_from] += f.flow;
  }

  fire::FireCache cache(net, plan.scenario, t_from);
  cache.extend_to(t_to);

  json features = json::array();
  for (int k = 0; k < net.arc_count(); ++k) {
    const auto& arc = net.arcs[k];
    json coords = json::array();
    for (const auto& p : arc.geometry.vertices()) coords.push_back(lonlat(p, net.origin));
    json caps = json::array();
    std::int64_t total = 0;
    for (int t = t_from; t <= t_to; ++t) {
      const bool closed = cache.overtaken(t, arc.from);
      caps.push_back(closed ? 0 : wten::scaled_capacity(arc.capacity, cache.arc_dist(t, k), arc.travel_time));
      total += per_t[k][t - t_from];
    }
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                        {"properties",
                         {{"kind", "road"},
                          {"name", arc.name},
                          {"from", net.nodes[arc.from].id},
                          {"to", net.nodes[arc.to].id},
                          {"flow", total},
                          {"flow_by_t", per_t[k]},
                          {"capacity_at_t", caps},
                          {"used", total > 0}}}});
  }
  for (int t = t_from; t <= t_to; ++t) {
    const auto set = fire::fire_set_at(plan.scenario, t);
    std::vector<geometry::Polygon> polys = set.polygons;
    for (const auto& c : set.circles) polys.push_back(geometry::circle_polygon(c));
    for (const auto& poly : polys) {
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "Polygon"}, {"coordinates", polygon_coords(poly.ring, net.origin)}}},
                          {"properties", {{"kind", "fire"}, {"t", t}}}});
    }
  }
  return {{"type", "FeatureCollection"},
          {"t_from", t_from},
          {"t_to", t_to},
          {"dt_seconds", dt_value(plan.dt_seconds)},
          {"features", features}};
}

json run_report(const std::string& command, const planner::EvacuationPlan& plan) {
  const auto& tm = plan.timings;
  const auto& sz = plan.sizes;
  return {{"command", command},
          {"timings", {{"fire_s", tm.fire_s}, {"wten_s", tm.wten_s}, {"maxflow_s", tm.maxflow_s}, {"total_s", tm.total_s}}},
          {"sizes",
           {{"base_nodes", sz.base_nodes},
            {"base_arcs", sz.base_arcs},
            {"wten_nodes", sz.wten_nodes},
            {"wten_arcs", sz.wten_arcs}}},
          {"plan",
           {{"T_sol", plan.horizon},
            {"evacuated", plan.evacuated},
            {"stranded", plan.stranded},
            {"total_supply", plan.total_supply},
            {"complete", plan.complete},
            {"iterations", plan.iterations}}}};
}

std::string stats_table(const std::vector<std::pair<std::string, json>>& reports) {
  if (reports.empty()) throw InputError("no reports given");
  struct Row {
    const char* label;
    const char* group;
    const char* key;
    bool seconds;
  };
  static const Row rows[] = {
      {"fire model (s)", "timings", "fire_s", true},
      {"WTEN construction (s)", "timings", "wten_s", true},
      {"max flow (s)", "timings", "maxflow_s", true},
      {"total (s)", "timings", "total_s", true},
      {"|N|", "sizes", "base_nodes", false},
      {"|A|", "sizes", "base_arcs", false},
      {"|N_W|", "sizes", "wten_nodes", false},
      {"|A_W|", "sizes", "wten_arcs", false},
      {"T_sol", "plan", "T_sol", false},
      {"evacuated", "plan", "evacuated", false},
      {"total supply", "plan", "total_supply", false},
      {"iterations", "plan", "iterations", false},
  };

  std::vector<std::string> header{"metric"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) cells.push_back({r.label});
  for (const auto& [name, rep] : reports) {
    if (!rep.is_object() || !rep.contains("timings") || !rep.at("timings").is_object()) {
      throw InputError("report " + name + " has no timings");
    }
    header.push_back(name);
    for (std::size_t k = 0; k < std::size(rows); ++k) {
      const auto& r = rows[k];
      std::string text = "-";
      if (rep.contains(r.group) && rep.at(r.group).contains(r.key)) {
        const auto& v = rep.at(r.group).at(r.key);
        if (!v.is_number()) throw InputError("report " + name + ": " + r.key + " is not a number");
        std::ostringstream os;
        if (r.seconds) {
          if (v.get<double>() < 0) throw InputError("report " + name + ": negative timing " + r.key);
          os << std::fixed << std::setprecision(3) << v.get<double>();
        } else {
          os << v.get<std::int64_t>();
        }
        text = os.str();
      }
      cells[k].push_back(text);
    }
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) out << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      else out << "  " << std::right << std::setw(static_cast<int>(width[c])) << row[c];
    }
    out << '\n';
  };
  emit(header);
  std::size_t total_width = 0;
  for (auto w : width) total_width += w + 2;
  out << std::string(total_width - 2, '-') << '\n';
  for (const auto& row : cells) emit(row);
  return out.str();
}

}  // namespace evac::io
