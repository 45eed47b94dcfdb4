// evac: plan, replan, export and summarize wildfire evacuations.

#include "evac/error.hpp"
#include "evac/io.hpp"
#include "evac/log.hpp"
#include "evac/planner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace evac;
using io::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;

struct PlanArgs {
  std::string network, fire, out, report;
  double tolerance = 0.0;
  int tmax = 0;
  bool holdover_all = false;
};

struct UpdateArgs {
  std::string network, plan, fire_update, out, report;
  int t_reopt = 0;
  int t_fire = -1;
  int tmax = -1;
  bool holdover_all = false;
};

struct ExportArgs {
  std::string plan, network, format = "geojson", out;
  int t_from = 0;
  int t_to = -1;
};

struct ConvertArgs {
  std::string nodes, edges, out;
  double dt = 60.0;
};

void summarize(const planner::EvacuationPlan& plan) {
  std::cout << "T_sol=" << plan.horizon << " evacuated=" << plan.evacuated << "/" << plan.total_supply
            << " stranded=" << plan.stranded << (plan.complete ? " complete" : " incomplete") << "\n";
}

void run_plan(const PlanArgs& a) {
  const auto net = io::load_contracted(std::filesystem::path(a.network), a.tolerance);
  log::info("network: " + std::to_string(net.node_count()) + " nodes, " + std::to_string(net.arc_count()) +
            " roads after contraction");
  const auto file = io::make_plan(net, io::read_json_file(a.fire, "fire"), a.tolerance, a.tmax, {a.holdover_all});
  io::write_text_file(a.out, io::dump(io::plan_to_json(file, net)));
  if (!a.report.empty()) io::write_text_file(a.report, io::dump(io::run_report("plan", file.plan)));
  summarize(file.plan);
}

void run_update(const UpdateArgs& a) {
  const auto prev_doc = io::read_json_file(a.plan, "plan");
  const auto net = io::load_contracted(std::filesystem::path(a.network), io::plan_tolerance(prev_doc));
  const auto prev = io::plan_from_json(prev_doc, net);
  const auto upd = io::read_json_file(a.fire_update, "fire update");
  const auto file = io::make_update(net, prev, upd, a.t_reopt, a.t_fire, a.tmax, {a.holdover_all});
  io::write_text_file(a.out, io::dump(io::plan_to_json(file, net)));
  if (!a.report.empty()) io::write_text_file(a.report, io::dump(io::run_report("update", file.plan)));
  summarize(file.plan);
}

void run_export(const ExportArgs& a) {
  if (a.format != "geojson") throw InputError("unsupported export format '" + a.format + "'");
  const auto doc = io::read_json_file(a.plan, "plan");
  const auto net = io::load_contracted(std::filesystem::path(a.network), io::plan_tolerance(doc));
  const auto file = io::plan_from_json(doc, net);
  const int t_to = a.t_to < 0 ? file.plan.horizon : a.t_to;
  io::write_text_file(a.out, io::dump(io::export_geojson(file, net, a.t_from, t_to)));
}

void run_stats(const std::vector<std::string>& paths) {
  std::vector<std::pair<std::string, json>> reports;
  for (const auto& p : paths) reports.emplace_back(std::filesystem::path(p).filename().string(), io::read_json_file(p, "report"));
  std::cout << io::stats_table(reports);
}

void run_convert(const ConvertArgs& a) {
  const auto doc = io::convert_csv(a.nodes, a.edges, a.dt);
  roadnet::load_network(doc);  // reject what plan would reject
  io::write_text_file(a.out, io::dump(doc));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wildfire evacuation planner on time-expanded road networks"};
  app.require_subcommand(1);
  std::string level;
  app.add_option("--log", level, "error|warn|info|debug (overrides EVAC_LOG)");

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Compute an initial evacuation plan");
  plan->add_option("--network", pa.network, "network JSON")->required();
  plan->add_option("--fire", pa.fire, "fire scenario JSON")->required();
  plan->add_option("--tolerance", pa.tolerance, "node merge radius in meters")->default_val(0.0);
  plan->add_option("--tmax", pa.tmax, "largest horizon to try (instances)")->required();
  plan->add_option("--out", pa.out, "plan output")->required();
  plan->add_option("--report", pa.report, "run report output");
  plan->add_flag("--holdover-all", pa.holdover_all, "let evacuees wait at every intersection");

  UpdateArgs ua;
  auto* update = app.add_subcommand("update", "Replan from t_reopt after a fire forecast change");
  update->add_option("--network", ua.network, "network JSON")->required();
  update->add_option("--plan", ua.plan, "previous plan")->required();
  update->add_option("--fire-update", ua.fire_update, "new fire scenario with t_fire")->required();
  update->add_option("--t-reopt", ua.t_reopt, "first instance the plan may change")->required();
  update->add_option("--t-fire", ua.t_fire, "overrides t_fire in the update file");
  update->add_option("--tmax", ua.tmax, "largest horizon (default: the previous plan's)");
  update->add_option("--out", ua.out, "plan output")->required();
  update->add_option("--report", ua.report, "run report output");
  update->add_flag("--holdover-all", ua.holdover_all, "let evacuees wait at every intersection");

  ExportArgs ea;
  auto* exp = app.add_subcommand("export", "Export per-instance road flows for mapping");
  exp->add_option("--plan", ea.plan, "plan file")->required();
  exp->add_option("--network", ea.network, "network JSON")->required();
  exp->add_option("--format", ea.format, "output format")->default_val("geojson");
  exp->add_option("--t-from", ea.t_from, "first instance")->default_val(0);
  exp->add_option("--t-to", ea.t_to, "last instance (default: T_sol)");
  exp->add_option("--out", ea.out, "output file")->required();

  std::vector<std::string> report_paths;
  auto* stats = app.add_subcommand("stats", "Tabulate run reports side by side");
  stats->add_option("reports", report_paths, "report files")->required();

  ConvertArgs ca;
  auto* convert = app.add_subcommand("convert", "Build a network JSON from nodes.csv and edges.csv");
  convert->add_option("--nodes", ca.nodes, "nodes CSV")->required();
  convert->add_option("--edges", ca.edges, "edges CSV")->required();
  convert->add_option("--dt", ca.dt, "seconds per instance")->default_val(60.0);
  convert->add_option("--out", ca.out, "network output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (!level.empty()) log::set_threshold(log::parse_level(level));
    if (*plan) run_plan(pa);
    else if (*update) run_update(ua);
    else if (*exp) run_export(ea);
    else if (*stats) run_stats(report_paths);
    else if (*convert) run_convert(ca);
  } catch (const InfeasibleError& e) {
    log::error(e.what());
    return kExitInfeasible;
  } catch (const InputError& e) {
    log::error(e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    log::error(e.what());
    return kExitInput;
  }
  return kExitOk;
}
