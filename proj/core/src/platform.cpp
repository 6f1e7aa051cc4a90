#include "edgertm/platform.hpp"

#include <algorithm>
#include <set>

#include "edgertm/errors.hpp"

namespace edgertm {

std::string_view to_string(ClusterKind kind) {
  switch (kind) {
    case ClusterKind::cpu: return "cpu";
    case ClusterKind::gpu: return "gpu";
    case ClusterKind::npu: return "npu";
  }
  return "cpu";
}

ClusterKind cluster_kind_from_string(std::string_view text) {
  if (text == "cpu") return ClusterKind::cpu;
  if (text == "gpu") return ClusterKind::gpu;
  if (text == "npu") return ClusterKind::npu;
  throw UsageError("unknown cluster kind '" + std::string(text) + "'");
}

bool ClusterSpec::has_level(int freq_mhz) const {
  return std::binary_search(freq_levels_mhz.begin(), freq_levels_mhz.end(), freq_mhz);
}

void PlatformSpec::validate() const {
  if (!power_budget_mw.is_positive())
    throw InvariantError("platform '" + name + "': power_budget_mw must be > 0");
  std::set<std::string> ids;
  for (const auto& c : clusters) {
    if (c.id.empty()) throw InvariantError("platform '" + name + "': empty cluster id");
    if (!ids.insert(c.id).second)
      throw InvariantError("platform '" + name + "': duplicate cluster id '" + c.id + "'");
    if (c.domain_id.empty())
      throw InvariantError("cluster '" + c.id + "': empty domain id");
    if (c.core_count < 1)
      throw InvariantError("cluster '" + c.id + "': core_count must be >= 1");
    if (c.kind == ClusterKind::npu && c.npu_capacity < 1)
      throw InvariantError("cluster '" + c.id + "': npu_capacity must be >= 1");
    if (c.freq_levels_mhz.empty())
      throw InvariantError("cluster '" + c.id + "': empty frequency ladder");
    for (std::size_t i = 1; i < c.freq_levels_mhz.size(); ++i)
      if (c.freq_levels_mhz[i] <= c.freq_levels_mhz[i - 1])
        throw InvariantError("cluster '" + c.id + "': ladder must be strictly ascending");
  }
  for (const auto& domain : domain_ids())
    if (domain_levels(domain).empty())
      throw InvariantError("platform '" + name + "': domain '" + domain +
                           "' has no frequency level common to all member clusters");
}

const ClusterSpec* PlatformSpec::find_cluster(const std::string& id) const {
  for (const auto& c : clusters)
    if (c.id == id) return &c;
  return nullptr;
}

std::vector<std::string> PlatformSpec::domain_ids() const {
  std::vector<std::string> out;
  for (const auto& c : clusters) out.push_back(c.domain_id);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> PlatformSpec::clusters_in_domain(const std::string& domain_id) const {
  std::vector<std::string> out;
  for (const auto& c : clusters)
    if (c.domain_id == domain_id) out.push_back(c.id);
  return out;
}

std::vector<int> PlatformSpec::domain_levels(const std::string& domain_id) const {
  std::vector<int> common;
  bool first = true;
  for (const auto& c : clusters) {
    if (c.domain_id != domain_id) continue;
    if (first) {
      common = c.freq_levels_mhz;
      first = false;
    } else {
      std::vector<int> next;
      std::set_intersection(common.begin(), common.end(), c.freq_levels_mhz.begin(),
                            c.freq_levels_mhz.end(), std::back_inserter(next));
      common = std::move(next);
    }
  }
  return common;
}

std::optional<std::string> PlatformSpec::npu_rider_cluster() const {
  const ClusterSpec* best = nullptr;
  for (const auto& c : clusters) {
    if (c.kind != ClusterKind::cpu) continue;
    if (!best || c.freq_levels_mhz.back() < best->freq_levels_mhz.back() ||
        (c.freq_levels_mhz.back() == best->freq_levels_mhz.back() && c.id < best->id))
      best = &c;
  }
  if (!best) return std::nullopt;
  return best->id;
}

namespace {

std::vector<int> steps(int from_mhz, int to_mhz, int step_mhz) {
  std::vector<int> out;
  for (int f = from_mhz; f <= to_mhz; f += step_mhz) out.push_back(f);
  return out;
}

} // namespace

PlatformSpec builtin_platform(std::string_view name) {
  PlatformSpec spec;
  if (name == "odroid-xu3") {
    spec.name = "odroid-xu3";
    spec.power_budget_mw = PowerMw::from_int(7000);
    spec.clusters = {
        {"a15", ClusterKind::cpu, 4, steps(200, 1800, 100), "a15", 0},
        {"a7", ClusterKind::cpu, 4, steps(200, 1300, 100), "a7", 0},
    };
  } else if (name == "jetson-nano") {
    spec.name = "jetson-nano";
    spec.power_budget_mw = PowerMw::from_int(10000);
    // Ladders carry only the measured frequencies.
    spec.clusters = {
        {"a57", ClusterKind::cpu, 4, {921, 1430}, "a57", 0},
        {"gpu", ClusterKind::gpu, 1, {614, 921}, "gpu", 0},
    };
  } else if (name == "generic-npu-soc") {
    spec.name = "generic-npu-soc";
    spec.power_budget_mw = PowerMw::from_int(8000);
    spec.clusters = {
        {"big", ClusterKind::cpu, 4, {600, 1000, 1400, 1800}, "big", 0},
        {"little", ClusterKind::cpu, 4, {600, 900, 1200, 1400}, "little", 0},
        {"gpu", ClusterKind::gpu, 1, {400, 600, 800}, "gpu", 0},
        {"npu", ClusterKind::npu, 1, {800, 1000}, "npu", 2},
    };
  } else {
    throw UsageError("unknown platform '" + std::string(name) +
                     "' (known: odroid-xu3, jetson-nano, generic-npu-soc)");
  }
  spec.validate();
  return spec;
}

std::vector<std::string> builtin_platform_names() {
  return {"odroid-xu3", "jetson-nano", "generic-npu-soc"};
}

PlatformState PlatformState::initial(const PlatformSpec& spec) {
  spec.validate();
  PlatformState state;
  for (const auto& domain : spec.domain_ids())
    state.domain_freq_[domain] = spec.domain_levels(domain).front();
  return state;
}

int PlatformState::domain_frequency(const std::string& domain_id) const {
  auto it = domain_freq_.find(domain_id);
  if (it == domain_freq_.end()) throw UsageError("unknown domain '" + domain_id + "'");
  return it->second;
}

int PlatformState::cluster_frequency(const PlatformSpec& spec, const std::string& cluster_id) const {
  const ClusterSpec* c = spec.find_cluster(cluster_id);
  if (!c) throw UsageError("unknown cluster '" + cluster_id + "'");
  return domain_frequency(c->domain_id);
}

int PlatformState::used_units(const std::string& cluster_id) const {
  auto it = holdings_.find(cluster_id);
  if (it == holdings_.end()) return 0;
  int used = 0;
  for (const auto& [owner, units] : it->second) used += units;
  return used;
}

int PlatformState::free_units(const PlatformSpec& spec, const std::string& cluster_id) const {
  const ClusterSpec* c = spec.find_cluster(cluster_id);
  if (!c) throw UsageError("unknown cluster '" + cluster_id + "'");
  return c->units() - used_units(cluster_id);
}

const std::map<std::string, int>& PlatformState::holdings(const std::string& cluster_id) const {
  static const std::map<std::string, int> empty;
  auto it = holdings_.find(cluster_id);
  return it == holdings_.end() ? empty : it->second;
}

bool PlatformState::owns_anything(const std::string& workload_id) const {
  for (const auto& [cluster, owners] : holdings_)
    if (owners.count(workload_id)) return true;
  return false;
}

PlatformState PlatformState::with_frequency(const PlatformSpec& spec, const std::string& domain_id,
                                            int freq_mhz) const {
  auto it = domain_freq_.find(domain_id);
  if (it == domain_freq_.end()) throw UsageError("unknown domain '" + domain_id + "'");
  for (const auto& c : spec.clusters) {
    if (c.domain_id != domain_id) continue;
    if (!c.has_level(freq_mhz))
      throw UsageError("frequency " + std::to_string(freq_mhz) + " MHz is not on the ladder of cluster '" +
                       c.id + "' (domain '" + domain_id + "')");
  }
  PlatformState next = *this;
  next.domain_freq_[domain_id] = freq_mhz;
  return next;
}

PlatformState PlatformState::with_allocation(const PlatformSpec& spec, const std::string& workload_id,
                                             const ResourceSlot& slot) const {
  const ClusterSpec* cluster = spec.find_cluster(slot.cluster_id);
  if (!cluster) throw UsageError("unknown cluster '" + slot.cluster_id + "'");
  if (slot.core_count < 1 || slot.core_count > cluster->units())
    throw UsageError("slot requests " + std::to_string(slot.core_count) + " units of cluster '" +
                     slot.cluster_id + "' (limit " + std::to_string(cluster->units()) + ")");
  if (domain_frequency(cluster->domain_id) != slot.freq_mhz)
    throw UsageError("slot frequency " + std::to_string(slot.freq_mhz) +
                     " MHz differs from domain frequency " +
                     std::to_string(domain_frequency(cluster->domain_id)) +
                     " MHz; set the domain frequency first");
  if (free_units(spec, slot.cluster_id) < slot.core_count)
    throw ContentionError("cluster '" + slot.cluster_id + "': " +
                          std::to_string(free_units(spec, slot.cluster_id)) + " of " +
                          std::to_string(cluster->units()) + " units free, " +
                          std::to_string(slot.core_count) + " requested");

  PlatformState next = *this;
  if (cluster->kind == ClusterKind::npu) {
    // One pre-processing core rides along on the little cpu cluster.
    if (auto rider = spec.npu_rider_cluster()) {
      if (free_units(spec, *rider) < 1)
        throw ContentionError("cluster '" + *rider + "': no core free for the NPU pre-processing rider");
      next.holdings_[*rider][workload_id] += 1;
    }
  }
  next.holdings_[slot.cluster_id][workload_id] += slot.core_count;
  return next;
}

PlatformState PlatformState::with_release(const PlatformSpec& spec, const std::string& workload_id) const {
  (void)spec;
  if (!owns_anything(workload_id))
    throw UsageError("release: workload '" + workload_id + "' holds no resources");
  PlatformState next = *this;
  for (auto it = next.holdings_.begin(); it != next.holdings_.end();) {
    it->second.erase(workload_id);
    if (it->second.empty())
      it = next.holdings_.erase(it);
    else
      ++it;
  }
  return next;
}

PlatformState PlatformState::with_total_power(PowerMw power) const {
  PlatformState next = *this;
  next.total_power_ = power;
  return next;
}

PowerMw total_power(const PlatformState& state,
                    const std::vector<std::pair<std::string, OperatingPoint>>& assignments) {
  PowerMw sum;
  for (const auto& [workload_id, point] : assignments) {
    if (!state.owns_anything(workload_id))
      throw UsageError("total_power: workload '" + workload_id + "' holds no resources");
    sum += point.power_mw;
  }
  return sum;
}

bool thermal_ok(const PlatformSpec& spec, PowerMw power_mw) {
  return power_mw <= spec.power_budget_mw;
}

} // namespace edgertm
