// Python bindings. Documents cross the boundary as JSON text; the package's
// __init__ turns them into dicts. plan/update run without the GIL, so they
// must not touch Python objects.

#include "evac/error.hpp"
#include "evac/io.hpp"
#include "evac/maxflow.hpp"
#include "evac/planner.hpp"
#include "evac/ten.hpp"
#include "evac/wten.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace evac;
using io::json;

namespace {

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

std::pair<std::string, std::string> plan(const std::string& network, const std::string& fire_doc, int t_max, double tolerance_m,
               bool holdover_all) {
  const auto net = io::load_contracted(parse(network, "network"), tolerance_m);
  const auto file = io::make_plan(net, parse(fire_doc, "fire"), tolerance_m, t_max, {holdover_all});
  return {io::dump(io::plan_to_json(file, net)), io::dump(io::run_report("plan", file.plan))};
}

std::pair<std::string, std::string> update(const std::string& network, const std::string& plan_doc, const std::string& fire_update,
                 int t_reopt, int t_fire, int t_max, bool holdover_all) {
  const auto prev_doc = parse(plan_doc, "plan");
  const auto net = io::load_contracted(parse(network, "network"), io::plan_tolerance(prev_doc));
  const auto prev = io::plan_from_json(prev_doc, net);
  const auto file =
      io::make_update(net, prev, parse(fire_update, "fire update"), t_reopt, t_fire, t_max, {holdover_all});
  return {io::dump(io::plan_to_json(file, net)), io::dump(io::run_report("update", file.plan))};
}

std::string export_geojson(const std::string& network, const std::string& plan_doc, int t_from, int t_to) {
  const auto doc = parse(plan_doc, "plan");
  const auto net = io::load_contracted(parse(network, "network"), io::plan_tolerance(doc));
  const auto file = io::plan_from_json(doc, net);
  return io::dump(io::export_geojson(file, net, t_from, t_to < 0 ? file.plan.horizon : t_to));
}

std::string stats_table(const std::vector<std::pair<std::string, std::string>>& reports) {
  std::vector<std::pair<std::string, json>> parsed;
  for (const auto& [name, text] : reports) parsed.emplace_back(name, parse(text, "report"));
  return io::stats_table(parsed);
}

std::string convert_csv(const std::string& nodes, const std::string& edges, double dt) {
  return io::dump(io::convert_csv(nodes, edges, dt));
}

std::string ten_edge_list(const std::string& network, int T) {
  const auto net = roadnet::load_network(parse(network, "network"));
  const auto t = ten::build_ten(net, T);
  auto all = t.movement_arcs;
  all.insert(all.end(), t.holdover_arcs.begin(), t.holdover_arcs.end());
  return ten::dump_edge_list(all);
}

py::tuple max_flow(int node_count, int source, int sink, std::vector<int> tail, std::vector<int> head,
                   std::vector<std::int64_t> capacity, const std::string& solver) {
  if (node_count <= 0 || source < 0 || sink < 0 || source >= node_count || sink >= node_count) {
    throw InputError("source and sink must be node indices");
  }
  for (std::size_t k = 0; k < tail.size(); ++k) {
    if (tail[k] < 0 || tail[k] >= node_count || (k < head.size() && (head[k] < 0 || head[k] >= node_count))) {
      throw InputError("arc endpoint out of range");
    }
  }
  const maxflow::FlowProblem p{node_count, source, sink, std::move(tail), std::move(head), std::move(capacity)};
  maxflow::FlowSolution sol;
  if (solver == "dinic") sol = maxflow::dinic(p);
  else if (solver == "edmonds-karp") sol = maxflow::edmonds_karp(p);
  else throw InputError("unknown solver '" + solver + "'");
  return py::make_tuple(sol.value, sol.arc_flow);
}

}  // namespace

PYBIND11_MODULE(_evac, m) {
  m.doc() = "Wildfire evacuation planning on time-expanded road networks";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

  m.def("plan", &plan, py::arg("network"), py::arg("fire"), py::arg("t_max"), py::arg("tolerance_m") = 0.0,
        py::arg("holdover_all") = false, py::call_guard<py::gil_scoped_release>());
  m.def("update", &update, py::arg("network"), py::arg("plan"), py::arg("fire_update"), py::arg("t_reopt"),
        py::arg("t_fire") = -1, py::arg("t_max") = -1, py::arg("holdover_all") = false,
        py::call_guard<py::gil_scoped_release>());
  m.def("export_geojson", &export_geojson, py::arg("network"), py::arg("plan"), py::arg("t_from") = 0,
        py::arg("t_to") = -1);
  m.def("stats_table", &stats_table, py::arg("reports"));
  m.def("convert_csv", &convert_csv, py::arg("nodes"), py::arg("edges"), py::arg("dt_seconds") = 60.0);
  m.def("ten_edge_list", &ten_edge_list, py::arg("network"), py::arg("T"));
  m.def("max_flow", &max_flow, py::arg("node_count"), py::arg("source"), py::arg("sink"), py::arg("tail"),
        py::arg("head"), py::arg("capacity"), py::arg("solver") = "dinic");
  m.def("node_label", &ten::node_label, py::arg("i"), py::arg("t"), py::arg("n"));
  m.def("capacity_fraction", &wten::capacity_fraction, py::arg("f_m"), py::arg("lam"));
  m.def("scaled_capacity", &wten::scaled_capacity, py::arg("capacity"), py::arg("f_m"), py::arg("lam"));
}
