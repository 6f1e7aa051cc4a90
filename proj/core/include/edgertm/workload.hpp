#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "edgertm/fixed3.hpp"
#include "edgertm/operating_point.hpp"

namespace edgertm {

/// The default four-increment configuration ladder: 25/50/75/100 percent.
std::vector<Percent> default_config_ladder();

/// Cost of moving between configuration levels, charged per ladder step.
/// Defaults to zero: a dynamically scalable model keeps every configuration
/// in one memory footprint, so switching needs no model swap.
struct ReconfigCost {
  TimeMs switch_time_ms{};
  EnergyMj switch_energy_mj{};

  friend bool operator==(const ReconfigCost&, const ReconfigCost&) = default;
};

/// A runtime-scalable workload. Accuracy per level is data (characterization
/// input), non-decreasing in level; scaling between levels never retrains or
/// alters it.
struct DnnWorkload {
  std::string id;
  std::vector<Percent> config_ladder = default_config_ladder();  // ascending
  std::map<Percent, Percent> accuracy_by_level;
  Budgets budgets;
  std::int64_t arrival_ms = 0;
  std::optional<std::int64_t> exit_ms;
  ReconfigCost reconfig;
  Percent active_level;  // defaults to the top of the ladder

  /// Checks ladder shape and the monotone accuracy contract; sets
  /// active_level to the top level if unset. Throws InvariantError.
  void validate();

  bool on_ladder(Percent level) const;
  int rank_of(Percent level) const;  // UsageError when off the ladder
  Percent accuracy_at(Percent level) const;

  /// Stricter t_max means higher priority; unbounded sorts last.
  std::optional<TimeMs> priority_key() const { return budgets.t_max_ms; }

  friend bool operator==(const DnnWorkload&, const DnnWorkload&) = default;
};

/// A non-scalable co-runner (e.g. a VR/AR application): a fixed resource
/// demand and a fixed power draw the governor must account for but cannot
/// adjust.
struct OpaqueWorkload {
  std::string id;
  ResourceSlot fixed_demand;
  PowerMw fixed_power_mw;
  std::int64_t arrival_ms = 0;
  std::optional<std::int64_t> exit_ms;

  friend bool operator==(const OpaqueWorkload&, const OpaqueWorkload&) = default;
};

bool alive_at(const DnnWorkload& w, std::int64_t at_ms);
bool alive_at(const OpaqueWorkload& w, std::int64_t at_ms);

/// Returns a copy with the active level changed. Accuracy data is untouched;
/// the previous level's accuracy is restored exactly on the way back.
/// Throws UsageError for a level off the ladder.
DnnWorkload scale(const DnnWorkload& workload, Percent level);

/// (time, energy) cost of moving between two ladder levels: rank distance
/// times the per-step costs. Zero when the levels are equal.
std::pair<TimeMs, EnergyMj> switch_cost(const std::vector<Percent>& ladder,
                                        Percent from_level, Percent to_level,
                                        const ReconfigCost& cost);

/// What a live workload demands: a fixed slot for opaque workloads, a
/// governor-chosen marker for scalable ones. Throws LifecycleError outside
/// the [arrival, exit) window.
struct DemandDescriptor {
  bool governor_chosen = false;
  std::optional<ResourceSlot> slot;  // set iff !governor_chosen
};

DemandDescriptor active_demand(const DnnWorkload& w, std::int64_t at_ms);
DemandDescriptor active_demand(const OpaqueWorkload& w, std::int64_t at_ms);

/// Cross-checks a workload against its operating-point table: the ladder
/// must equal the table's level set, and accuracy_by_level is filled from
/// the table (which already enforces per-level uniformity). Throws
/// InvariantError on mismatch.
void bind_table(DnnWorkload& workload, const OperatingPointTable& table);

} // namespace edgertm
