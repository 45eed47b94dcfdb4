#pragma once

// Files: plan documents, GeoJSON export, run reports and the CSV converter.

#include "evac/fire.hpp"
#include "evac/planner.hpp"
#include "evac/roadnet.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace evac::io {

using nlohmann::json;

/// The fire documents a plan was computed against: the initial scenario and
/// every update folded onto it, in order.
struct FireHistory {
  struct Update {
    int t_fire = 0;
    int t_max = 0;
    json doc;
  };
  json base;
  std::vector<Update> updates;

  fire::FireScenario rebuild(const geometry::GeoOrigin& origin) const;
};

struct PlanFile {
  planner::EvacuationPlan plan;
  FireHistory fire;
  double tolerance_m = 0.0;
  int t_max = 0;
};

json read_json_file(const std::filesystem::path& path, const std::string& what);
/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string dump(const json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);

json plan_to_json(const PlanFile& file, const roadnet::DynamicNetwork& net);
/// Rebuilds the plan (including its fire scenario) against `net`, which must
/// be the contracted network the plan was made on.
PlanFile plan_from_json(const json& doc, const roadnet::DynamicNetwork& net);

/// Loads a network file and contracts it with `tolerance_m`.
roadnet::DynamicNetwork load_contracted(const std::filesystem::path& path, double tolerance_m);
roadnet::DynamicNetwork load_contracted(const json& network_doc, double tolerance_m);

/// tolerance_m recorded in a plan document (the network must be contracted
/// the same way before the plan can be read back).
double plan_tolerance(const json& plan_doc);

/// Initial plan for a contracted network and a fire document.
PlanFile make_plan(const roadnet::DynamicNetwork& net, const json& fire_doc, double tolerance_m, int t_max,
                   const planner::PlanOptions& options = {});

/// Replan `prev` against `update_doc`. t_fire < 0 takes it from the
/// document's "t_fire"; t_max < 0 keeps the previous plan's.
PlanFile make_update(const roadnet::DynamicNetwork& net, const PlanFile& prev, const json& update_doc, int t_reopt,
                     int t_fire = -1, int t_max = -1, const planner::PlanOptions& options = {});

/// One FeatureCollection for instances [t_from..t_to]: a feature per road
/// (flow departing in the range, per-instance flows and capacities) plus the
/// fire footprint at each instance.
json export_geojson(const PlanFile& file, const roadnet::DynamicNetwork& net, int t_from, int t_to);

json run_report(const std::string& command, const planner::EvacuationPlan& plan);
/// Aligned table, one column per (label, report).
std::string stats_table(const std::vector<std::pair<std::string, json>>& reports);

/// Network document from nodes.csv / edges.csv (see README for the columns).
json convert_csv(const std::filesystem::path& nodes_csv, const std::filesystem::path& edges_csv,
                 double dt_seconds = 60.0);

/// Splits CSV text into rows; handles quoted fields with embedded commas,
/// doubled quotes and newlines.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace evac::io
