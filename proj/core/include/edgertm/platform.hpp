#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgertm/fixed3.hpp"
#include "edgertm/operating_point.hpp"

namespace edgertm {

enum class ClusterKind { cpu, gpu, npu };

std::string_view to_string(ClusterKind kind);
ClusterKind cluster_kind_from_string(std::string_view text);

/// Static description of one cluster. For NPU clusters `npu_capacity` is the
/// number of shareable capacity units and takes the place of core_count in
/// occupancy accounting.
struct ClusterSpec {
  std::string id;
  ClusterKind kind = ClusterKind::cpu;
  int core_count = 1;
  std::vector<int> freq_levels_mhz;  // strictly ascending
  std::string domain_id;
  int npu_capacity = 0;              // npu only, >= 1

  int units() const { return kind == ClusterKind::npu ? npu_capacity : core_count; }
  bool has_level(int freq_mhz) const;

  friend bool operator==(const ClusterSpec&, const ClusterSpec&) = default;
};

/// Static SoC description. `power_budget_mw` is the default thermal ceiling:
/// a static power cap standing in for the thermal limit, adjustable at
/// runtime through scenario events.
struct PlatformSpec {
  std::string name;
  PowerMw power_budget_mw;
  std::vector<ClusterSpec> clusters;

  /// Throws InvariantError / UsageError on inconsistent specs (duplicate
  /// cluster ids, empty or non-ascending ladders, a frequency domain with no
  /// common level, missing npu_capacity).
  void validate() const;

  const ClusterSpec* find_cluster(const std::string& id) const;
  std::vector<std::string> domain_ids() const;  // ascending, distinct
  std::vector<std::string> clusters_in_domain(const std::string& domain_id) const;

  /// Frequencies valid for every cluster of the domain, ascending.
  std::vector<int> domain_levels(const std::string& domain_id) const;

  /// Cluster that hosts the one-core pre-processing companion of an NPU
  /// allocation: the cpu cluster with the lowest maximum frequency (ties by
  /// id). Empty when the platform has no cpu cluster.
  std::optional<std::string> npu_rider_cluster() const;

  friend bool operator==(const PlatformSpec&, const PlatformSpec&) = default;
};

/// Built-in platform models: "odroid-xu3", "jetson-nano", "generic-npu-soc".
/// Throws UsageError for unknown names.
PlatformSpec builtin_platform(std::string_view name);

/// Names accepted by builtin_platform, in documentation order.
std::vector<std::string> builtin_platform_names();

/// Mutable side of the platform: per-domain frequencies and per-cluster
/// occupancy with owners. Transitions are functional: each `with_*` returns
/// the successor state and leaves the source untouched.
class PlatformState {
public:
  /// Every domain starts at its lowest common level; nothing allocated.
  static PlatformState initial(const PlatformSpec& spec);

  int domain_frequency(const std::string& domain_id) const;  // UsageError if unknown
  int cluster_frequency(const PlatformSpec& spec, const std::string& cluster_id) const;

  /// Units of `cluster_id` in use (cores, or NPU capacity units).
  int used_units(const std::string& cluster_id) const;
  int free_units(const PlatformSpec& spec, const std::string& cluster_id) const;

  /// owner -> units held on `cluster_id`.
  const std::map<std::string, int>& holdings(const std::string& cluster_id) const;

  bool owns_anything(const std::string& workload_id) const;

  PowerMw total_power_mw() const { return total_power_; }

  /// Sets the frequency of a whole domain. The level must be on the ladder
  /// of every member cluster. Idempotent for the current value.
  [[nodiscard]] PlatformState with_frequency(const PlatformSpec& spec,
                                             const std::string& domain_id,
                                             int freq_mhz) const;

  /// Allocates `slot` to `workload_id`. The slot frequency must equal the
  /// current domain frequency (set it first). An NPU slot co-allocates one
  /// core on the rider cluster with zero added power. Throws ContentionError
  /// when the units are not free, UsageError on contract violations.
  [[nodiscard]] PlatformState with_allocation(const PlatformSpec& spec,
                                              const std::string& workload_id,
                                              const ResourceSlot& slot) const;

  /// Frees everything `workload_id` holds, riders included. UsageError when
  /// the workload holds nothing.
  [[nodiscard]] PlatformState with_release(const PlatformSpec& spec,
                                           const std::string& workload_id) const;

  [[nodiscard]] PlatformState with_total_power(PowerMw power) const;

  friend bool operator==(const PlatformState&, const PlatformState&) = default;

private:
  std::map<std::string, int> domain_freq_;
  // cluster -> owner -> units
  std::map<std::string, std::map<std::string, int>> holdings_;
  PowerMw total_power_{};
};

/// Sum of the assigned points' power draws. Assignments must reference
/// workloads that hold resources in `state`.
PowerMw total_power(const PlatformState& state,
                    const std::vector<std::pair<std::string, OperatingPoint>>& assignments);

/// power <= spec.power_budget_mw, inclusive at the boundary.
bool thermal_ok(const PlatformSpec& spec, PowerMw power_mw);

} // namespace edgertm
