#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "edgertm/fixed3.hpp"
#include "edgertm/operating_point.hpp"
#include "edgertm/platform.hpp"
#include "edgertm/workload.hpp"

namespace edgertm {

/// Governor output: the chosen operating point per workload (the point
/// carries its resource slot), the workloads that could not be served, and
/// an ordered list of audit tags replayed into the trace.
struct Decision {
  std::map<std::string, OperatingPoint> assignments;
  std::vector<std::string> infeasible;   // priority order
  std::vector<std::string> rationale;

  bool same_outcome(const Decision& other) const {
    return assignments == other.assignments && infeasible == other.infeasible;
  }
  friend bool operator==(const Decision&, const Decision&) = default;
};

/// One scalable workload as the allocator sees it: identity, its current
/// budgets, and its characterization table.
struct AllocRequest {
  std::string id;
  Budgets budgets;
  const OperatingPointTable* table = nullptr;
};

/// One fixed co-runner: pre-allocated before any scalable workload is placed.
struct OpaqueDemand {
  std::string id;
  ResourceSlot slot;
  PowerMw power_mw;
};

/// A complete allocation problem. `dnns` and `opaques` are in declaration
/// order; priority ordering (ascending t_max, stable) is derived internally.
struct AllocProblem {
  const PlatformSpec* platform = nullptr;
  PowerMw power_ceiling_mw;
  std::vector<AllocRequest> dnns;
  std::vector<OpaqueDemand> opaques;
};

/// Joint candidate spaces at or below this size are searched exhaustively;
/// larger ones fall back to greedy selection with a power-repair pass.
inline constexpr std::uint64_t kExhaustiveSpaceLimit = 1'000'000;

/// brute_force_allocate refuses joint spaces above this size.
inline constexpr std::uint64_t kBruteForceSpaceLimit = 10'000'000;

/// Highest-accuracy feasible point, restricted to `available` slots. Ties
/// break by minimum energy, then minimum time, then lowest frequency, then
/// resource key, then lowest level. Returns nullopt when nothing qualifies.
/// Budgets must carry at least one finite bound (UsageError otherwise).
std::optional<OperatingPoint> select_point(const OperatingPointTable& table,
                                           const Budgets& budgets,
                                           const std::set<ResourceSlot>& available);

/// Joint assignment maximizing the priority-ordered accuracy vector
/// (lexicographic; an unserved workload ranks below any served one) subject
/// to per-workload budgets, core/capacity exclusivity, frequency-domain
/// coupling and the platform power ceiling. Exhaustive for joint spaces up
/// to kExhaustiveSpaceLimit, greedy-with-repair beyond. Workloads that
/// cannot be served land in Decision.infeasible; the call never aborts.
Decision allocate_all(const AllocProblem& problem);

/// Flat enumeration over every (point | none) combination with the same
/// objective and tie-breaks as allocate_all. The reference answer for
/// equivalence testing. Throws UsageError when the space exceeds
/// kBruteForceSpaceLimit.
Decision brute_force_allocate(const AllocProblem& problem);

/// Re-runs allocate_all for an updated problem and prefixes the rationale
/// with the triggering tag ("arrival:dnn-2", "power-budget-change", ...).
Decision handle_event(std::string_view trigger_tag, const AllocProblem& problem);

/// Read-only performance signals as the control loop sees them.
struct Monitors {
  struct Achieved {
    TimeMs exec_time_ms;
    EnergyMj energy_mj;
    Percent accuracy_pct;
  };
  std::map<std::string, Achieved> per_workload;
  PowerMw total_power_mw;
  PowerMw power_budget_mw;
};

/// Actuated settings: per workload the active point (config level knob plus
/// mapping/frequency device knobs).
struct Knobs {
  std::map<std::string, OperatingPoint> settings;

  friend bool operator==(const Knobs&, const Knobs&) = default;
};

/// One control-loop step: computes the Decision for the current problem and
/// returns the knob settings to actuate. When the decision matches the
/// current knobs the knobs are returned unchanged (hysteresis: no actuation
/// for an unchanged optimum).
std::pair<Knobs, Decision> control_step(const AllocProblem& problem,
                                        const Monitors& monitors,
                                        const Knobs& current);

/// Monitors derived from an applied decision (predicted metrics).
Monitors monitors_of(const Decision& decision, PowerMw total_power, PowerMw ceiling);

} // namespace edgertm
