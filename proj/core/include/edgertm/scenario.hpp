#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgertm/operating_point.hpp"
#include "edgertm/platform.hpp"
#include "edgertm/workload.hpp"

namespace edgertm {

/// Everything that can happen at a timestamp. Arrival/exit events are
/// synthesized from the workloads' own arrival_ms/exit_ms fields; scenario
/// files may only script the other three kinds.
struct ScenarioEvent {
  enum class Kind {
    arrival,
    exit_,
    budget_change,
    power_budget_change,
    accuracy_requirement_change,
  };

  std::int64_t at_ms = 0;
  Kind kind = Kind::arrival;
  std::string workload_id;                 // empty for power_budget_change
  std::optional<Budgets> budgets;          // budget_change
  std::optional<PowerMw> power_budget_mw;  // power_budget_change
  std::optional<Percent> acc_min_pct;      // accuracy_requirement_change
  int declaration_index = 0;

  /// Trigger tag recorded in the trace, e.g. "arrival:dnn-1".
  std::string tag() const;
};

int kind_rank(ScenarioEvent::Kind kind);
std::string_view to_string(ScenarioEvent::Kind kind);

/// Total event order: (at_ms, kind rank, workload id, payload, declaration
/// index). Including the payload makes the order independent of the file's
/// event permutation even among same-kind, same-time events.
bool event_order_less(const ScenarioEvent& a, const ScenarioEvent& b);

/// A replayable script: platform, workloads with their tables, scripted
/// events, and the control quantum. `seed` is reserved for future stochastic
/// extensions; the deterministic core ignores it.
struct Scenario {
  PlatformSpec platform;
  std::int64_t control_quantum_ms = 100;
  std::int64_t horizon_ms = 0;
  std::uint64_t seed = 0;
  std::vector<DnnWorkload> dnns;        // declaration order
  std::vector<OpaqueWorkload> opaques;  // declaration order
  std::vector<std::string> declaration_order;  // all workload ids as declared
  std::map<std::string, OperatingPointTable> tables;  // dnn id -> table
  std::vector<ScenarioEvent> scripted_events;

  /// Structural checks beyond what loading enforces; build() calls this.
  void validate() const;
};

/// Parses a scenario JSON file. Table paths resolve relative to the scenario
/// file's directory. Throws SchemaError with a path-to-field diagnostic.
Scenario load_scenario(const std::filesystem::path& path);

/// Same, from a parsed JSON text with an explicit base directory for tables.
Scenario scenario_from_json_text(const std::string& json_text,
                                 const std::filesystem::path& base_dir);

} // namespace edgertm
