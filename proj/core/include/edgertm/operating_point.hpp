#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "edgertm/fixed3.hpp"

namespace edgertm {

/// One mapping target: a cluster, a number of cores (capacity units for NPU
/// clusters) and a frequency from the cluster's ladder. Ordering is the
/// canonical "resource key" used for deterministic tie-breaking: cluster id,
/// then core count, then frequency.
struct ResourceSlot {
  std::string cluster_id;
  int core_count = 1;
  int freq_mhz = 0;

  friend auto operator<=>(const ResourceSlot&, const ResourceSlot&) = default;
};

/// One measured (configuration, resource, frequency) tuple with its
/// platform-dependent metrics and the configuration's accuracy.
struct OperatingPoint {
  std::string workload_id;
  std::string platform;   // provenance label from the data file
  Percent config_pct;     // fraction of the model active, in (0, 100]
  ResourceSlot resource;
  TimeMs exec_time_ms;
  PowerMw power_mw;
  EnergyMj energy_mj;
  Percent accuracy_pct;

  friend bool operator==(const OperatingPoint&, const OperatingPoint&) = default;
};

/// Upper bounds on time/energy/power and a lower bound on accuracy. An
/// absent optional means unbounded; acc_min of zero is unconstrained.
struct Budgets {
  std::optional<TimeMs> t_max_ms;
  std::optional<EnergyMj> e_max_mj;
  std::optional<PowerMw> p_max_mw;
  Percent acc_min_pct{};

  bool any_bound() const {
    return t_max_ms || e_max_mj || p_max_mw || acc_min_pct.is_positive();
  }

  bool admits(const OperatingPoint& p) const {
    if (t_max_ms && p.exec_time_ms > *t_max_ms) return false;
    if (e_max_mj && p.energy_mj > *e_max_mj) return false;
    if (p_max_mw && p.power_mw > *p_max_mw) return false;
    return p.accuracy_pct >= acc_min_pct;
  }

  friend bool operator==(const Budgets&, const Budgets&) = default;
};

/// Relative deviation allowed between the stored energy and power*time.
/// Chosen as a validation gate, not a recompute rule: the table is the
/// source of truth for energy.
inline constexpr std::int64_t kEnergyGatePermille = 50;

/// Validated collection of operating points indexed by
/// (workload_id, config_pct, resource). Points keep their input order.
class OperatingPointTable {
public:
  OperatingPointTable() = default;

  /// Validates and adopts `points`. `source_lines`, when given, must parallel
  /// `points` and carries 1-based input line numbers for diagnostics.
  /// Throws InvariantError / DuplicateKeyError.
  static OperatingPointTable build(std::vector<OperatingPoint> points,
                                   const std::vector<int>* source_lines = nullptr);

  const std::vector<OperatingPoint>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }

  const OperatingPoint* find(const std::string& workload_id, Percent config_pct,
                             const ResourceSlot& resource) const;

  /// Distinct workload ids, ascending.
  std::vector<std::string> workload_ids() const;

  /// Ascending distinct configuration levels of `workload_id`.
  std::vector<Percent> ladder(const std::string& workload_id) const;

  /// Distinct resource slots of `workload_id`, in resource-key order.
  std::vector<ResourceSlot> slots(const std::string& workload_id) const;

  /// Subset for one workload (preserves order).
  OperatingPointTable for_workload(const std::string& workload_id) const;

private:
  std::vector<OperatingPoint> points_;
};

/// power * time / 1000 in millijoules. Throws DomainError on non-positive
/// inputs.
EnergyMj energy_of(PowerMw power_mw, TimeMs time_ms);

/// True iff `a` is no worse than `b` in time, energy and power, no worse in
/// accuracy, and strictly better in at least one of the four. Throws
/// UsageError when the points belong to different workloads.
bool dominates(const OperatingPoint& a, const OperatingPoint& b);

/// The non-dominated subset of a single-workload table, ordered by
/// (exec_time, energy, resource key, config level). An empty table yields an
/// empty result; mixed workload ids throw UsageError.
OperatingPointTable pareto_frontier(const OperatingPointTable& table);

/// Points satisfying all budget bounds, input order preserved. An empty
/// result signals infeasibility to the caller; it is not an error.
OperatingPointTable feasible_points(const OperatingPointTable& table, const Budgets& budgets);

} // namespace edgertm
