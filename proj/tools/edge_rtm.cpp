// edge-rtm: operating-point validation, Pareto/selection queries, scenario
// replay and trace summaries for the runtime resource-management library.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edgertm/errors.hpp"
#include "edgertm/governor.hpp"
#include "edgertm/operating_point.hpp"
#include "edgertm/platform.hpp"
#include "edgertm/scenario.hpp"
#include "edgertm/sim.hpp"
#include "edgertm/table_io.hpp"
#include "edgertm/trace.hpp"

namespace {

namespace fs = std::filesystem;
using namespace edgertm;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;       // usage or parse error
constexpr int kExitInfeasible = 2;  // no operating point satisfies the query
constexpr int kExitInvariant = 3;   // input data violates a declared invariant

Fixed3 parse_flag_value(const std::string& text, const std::string& flag) {
  auto value = Fixed3::parse(text);
  if (!value) throw UsageError(flag + ": bad decimal '" + text + "'");
  return *value;
}

int cmd_validate(const std::string& table_path) {
  ValidationReport report = validate_table_file(table_path);
  for (const auto& row : report.rows) {
    if (row.ok)
      std::cout << "row " << row.line << ": ok\n";
    else
      std::cout << "row " << row.line << ": " << row.message << "\n";
  }
  if (report.ok()) {
    std::cout << report.rows.size() << " rows ok\n";
    return kExitOk;
  }
  std::size_t bad = 0;
  for (const auto& row : report.rows)
    if (!row.ok) ++bad;
  std::cerr << bad << " of " << report.rows.size() << " rows failed validation\n";
  return kExitInvariant;
}

int cmd_pareto(const std::string& table_path, const std::string& format) {
  OperatingPointTable table = load_table(fs::path(table_path));
  OperatingPointTable frontier;
  // per-workload frontiers, concatenated in workload order
  std::vector<OperatingPoint> rows;
  for (const auto& id : table.workload_ids()) {
    auto sub = pareto_frontier(table.for_workload(id));
    rows.insert(rows.end(), sub.points().begin(), sub.points().end());
  }
  frontier = OperatingPointTable::build(std::move(rows));
  if (format == "json")
    write_table_json(frontier, std::cout);
  else
    write_table_csv(frontier, std::cout);
  return kExitOk;
}

int cmd_select(const std::string& table_path, const std::string& t_max, const std::string& e_max,
               const std::optional<std::string>& p_max, const std::optional<std::string>& acc_min) {
  OperatingPointTable table = load_table(fs::path(table_path));

  Budgets budgets;
  budgets.t_max_ms = parse_flag_value(t_max, "--t-max");
  budgets.e_max_mj = parse_flag_value(e_max, "--e-max");
  if (p_max) budgets.p_max_mw = parse_flag_value(*p_max, "--p-max");
  if (acc_min) budgets.acc_min_pct = parse_flag_value(*acc_min, "--acc-min");

  std::set<ResourceSlot> available;
  for (const auto& p : table.points()) available.insert(p.resource);

  auto chosen = select_point(table, budgets, available);
  if (!chosen) {
    std::cout << "rationale: infeasible, no point satisfies t<=" << budgets.t_max_ms->str()
              << "ms e<=" << budgets.e_max_mj->str() << "mJ";
    if (budgets.p_max_mw) std::cout << " p<=" << budgets.p_max_mw->str() << "mW";
    if (budgets.acc_min_pct.is_positive()) std::cout << " acc>=" << budgets.acc_min_pct.str();
    std::cout << "\n";
    return kExitInfeasible;
  }
  std::cout << table_csv_row(*chosen) << "\n";
  std::cout << "rationale: max accuracy " << chosen->accuracy_pct.str() << " at min energy "
            << chosen->energy_mj.str() << " mJ under t<=" << budgets.t_max_ms->str() << "ms e<="
            << budgets.e_max_mj->str() << "mJ\n";
  return kExitOk;
}

int run_one(const fs::path& scenario_path, const fs::path& trace_path, bool summary) {
  Scenario scenario = load_scenario(scenario_path);
  RunResult result = run(scenario);

  std::ofstream out(trace_path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + trace_path.string() + "'");
  write_trace_csv(result.trace, out);
  out.close();

  std::cerr << "trace: " << trace_path.string() << " (" << result.trace.size() << " rows)\n";
  if (summary && !result.trace.empty()) std::cout << format_summary(summarize(result.trace));
  return result.any_infeasible ? kExitInfeasible : kExitOk;
}

int cmd_run(const std::string& scenario_path, const std::optional<std::string>& trace_path,
            bool summary, const std::optional<std::string>& all_dir,
            const std::optional<std::string>& trace_dir) {
  if (all_dir) {
    fs::path out_dir = trace_dir ? fs::path(*trace_dir) : fs::current_path();
    std::vector<fs::path> scenario_files;
    for (const auto& entry : fs::directory_iterator(*all_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        scenario_files.push_back(entry.path());
    std::sort(scenario_files.begin(), scenario_files.end());
    if (scenario_files.empty()) throw UsageError("no .json scenarios in '" + *all_dir + "'");
    int worst = kExitOk;
    for (const auto& path : scenario_files) {
      fs::path out = out_dir / (path.stem().string() + ".trace.csv");
      worst = std::max(worst, run_one(path, out, summary));
    }
    return worst;
  }
  fs::path out = trace_path ? fs::path(*trace_path)
                            : fs::path(fs::path(scenario_path).stem().string() + ".trace.csv");
  return run_one(scenario_path, out, summary);
}

int cmd_summarize(const std::string& trace_path) {
  std::ifstream in(trace_path);
  if (!in) throw ParseError("cannot open '" + trace_path + "'");
  Trace trace = read_trace_csv(in);
  if (trace.empty()) throw InvariantError("empty trace: nothing to summarize");
  std::cout << format_summary(summarize(trace));
  return kExitOk;
}

int cmd_platform_dump(const std::string& name) {
  PlatformSpec spec = builtin_platform(name);
  nlohmann::json doc;
  doc["name"] = spec.name;
  doc["power_budget_mw"] = spec.power_budget_mw.to_double();
  doc["clusters"] = nlohmann::json::array();
  for (const auto& c : spec.clusters) {
    nlohmann::json cluster;
    cluster["id"] = c.id;
    cluster["kind"] = std::string(to_string(c.kind));
    cluster["core_count"] = c.core_count;
    cluster["freq_levels_mhz"] = c.freq_levels_mhz;
    cluster["domain_id"] = c.domain_id;
    if (c.kind == ClusterKind::npu) cluster["npu_capacity"] = c.npu_capacity;
    doc["clusters"].push_back(std::move(cluster));
  }
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"edge-rtm: runtime resource management for embedded ML workloads"};
  app.require_subcommand(1);

  // validate
  std::string validate_table;
  auto* validate = app.add_subcommand("validate", "Check a table file against the data invariants");
  validate->add_option("table", validate_table, "operating-point table (.csv or .json)")
      ->required()
      ->envname("EDGE_RTM_TABLE");

  // pareto
  std::string pareto_table;
  std::string pareto_format = "csv";
  auto* pareto = app.add_subcommand("pareto", "Emit the non-dominated operating points");
  pareto->add_option("table", pareto_table, "operating-point table")->required()->envname(
      "EDGE_RTM_TABLE");
  pareto->add_option("--format", pareto_format, "csv or json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}))
      ->envname("EDGE_RTM_FORMAT");

  // select
  std::string select_table, select_tmax, select_emax;
  std::optional<std::string> select_pmax, select_accmin;
  auto* select = app.add_subcommand("select", "Pick the best point for a budget query");
  select->add_option("--table", select_table, "operating-point table")->required()->envname(
      "EDGE_RTM_TABLE");
  select->add_option("--t-max", select_tmax, "time budget, ms")->required()->envname(
      "EDGE_RTM_T_MAX");
  select->add_option("--e-max", select_emax, "energy budget, mJ")->required()->envname(
      "EDGE_RTM_E_MAX");
  select->add_option("--p-max", select_pmax, "power budget, mW")->envname("EDGE_RTM_P_MAX");
  select->add_option("--acc-min", select_accmin, "accuracy floor, percent")
      ->envname("EDGE_RTM_ACC_MIN");

  // run
  std::string run_scenario;
  std::optional<std::string> run_trace, run_all, run_trace_dir;
  bool run_summary = false;
  auto* run_cmd = app.add_subcommand("run", "Replay a scenario and write its trace");
  run_cmd->add_option("scenario", run_scenario, "scenario file (.json)")->envname(
      "EDGE_RTM_SCENARIO");
  run_cmd->add_option("--trace", run_trace, "trace output path (default <scenario>.trace.csv)")
      ->envname("EDGE_RTM_TRACE");
  run_cmd->add_option("--all", run_all, "run every .json scenario in a directory")
      ->envname("EDGE_RTM_ALL");
  run_cmd->add_option("--trace-dir", run_trace_dir, "output directory for --all")
      ->envname("EDGE_RTM_TRACE_DIR");
  run_cmd->add_flag("--summary", run_summary, "print the trace summary to stdout");

  // summarize
  std::string summarize_trace;
  auto* summarize_cmd = app.add_subcommand("summarize", "Aggregate a written trace");
  summarize_cmd->add_option("trace", summarize_trace, "trace file (.csv)")->required()->envname(
      "EDGE_RTM_TRACE");

  // platform dump
  auto* platform_cmd = app.add_subcommand("platform", "Platform model helpers");
  platform_cmd->require_subcommand(1);
  std::string dump_name;
  auto* dump = platform_cmd->add_subcommand("dump", "Emit a built-in platform as JSON");
  dump->add_option("name", dump_name, "odroid-xu3 | jetson-nano | generic-npu-soc")
      ->required()
      ->envname("EDGE_RTM_PLATFORM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(validate_table);
    if (*pareto) return cmd_pareto(pareto_table, pareto_format);
    if (*select) return cmd_select(select_table, select_tmax, select_emax, select_pmax, select_accmin);
    if (*run_cmd) {
      if (run_scenario.empty() && !run_all) throw UsageError("run: give a scenario file or --all <dir>");
      return cmd_run(run_scenario, run_trace, run_summary, run_all, run_trace_dir);
    }
    if (*summarize_cmd) return cmd_summarize(summarize_trace);
    if (*dump) return cmd_platform_dump(dump_name);
  } catch (const InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const DuplicateKeyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
