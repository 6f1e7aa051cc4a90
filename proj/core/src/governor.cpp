#include "edgertm/governor.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>

#include "edgertm/errors.hpp"

namespace edgertm {

namespace {

/// True when `a` beats `b` in the per-point tie-break chain: maximum
/// accuracy, then minimum energy, minimum time, lowest frequency, resource
/// key order, and finally lowest config level to make the order total.
bool point_better(const OperatingPoint& a, const OperatingPoint& b) {
  if (a.accuracy_pct != b.accuracy_pct) return a.accuracy_pct > b.accuracy_pct;
  if (a.energy_mj != b.energy_mj) return a.energy_mj < b.energy_mj;
  if (a.exec_time_ms != b.exec_time_ms) return a.exec_time_ms < b.exec_time_ms;
  if (a.resource.freq_mhz != b.resource.freq_mhz) return a.resource.freq_mhz < b.resource.freq_mhz;
  if (a.resource != b.resource) return a.resource < b.resource;
  return a.config_pct < b.config_pct;
}

/// Immutable cluster/domain lookup tables, built once per allocation call.
struct PlatformIndex {
  std::vector<std::string> cluster_ids;
  std::vector<int> cluster_units;
  std::vector<int> cluster_domain;  // cluster index -> domain index
  std::vector<bool> cluster_is_npu;
  std::size_t domain_count = 0;
  int rider_cluster = -1;

  explicit PlatformIndex(const PlatformSpec& platform) {
    for (const auto& c : platform.clusters) {
      cluster_ids.push_back(c.id);
      cluster_units.push_back(c.units());
      cluster_is_npu.push_back(c.kind == ClusterKind::npu);
    }
    auto domains = platform.domain_ids();
    domain_count = domains.size();
    for (const auto& c : platform.clusters) {
      auto it = std::find(domains.begin(), domains.end(), c.domain_id);
      cluster_domain.push_back(static_cast<int>(it - domains.begin()));
    }
    if (auto rider = platform.npu_rider_cluster()) rider_cluster = cluster_index(*rider);
  }

  int cluster_index(const std::string& id) const {
    auto it = std::find(cluster_ids.begin(), cluster_ids.end(), id);
    return it == cluster_ids.end() ? -1 : static_cast<int>(it - cluster_ids.begin());
  }
};

/// Occupancy/coupling/power counters; copied at every search node, so it
/// holds nothing but plain integers.
struct Ledger {
  const PlatformIndex* idx = nullptr;
  std::vector<int> used;          // per cluster index
  std::vector<int> domain_freq;   // per domain index, 0 = unset
  PowerMw power;

  explicit Ledger(const PlatformIndex& index)
      : idx(&index), used(index.cluster_ids.size(), 0), domain_freq(index.domain_count, 0) {}

  /// Checks exclusivity, domain coupling and the ceiling for one more slot;
  /// commits and returns true when everything fits.
  bool try_add(const ResourceSlot& slot, PowerMw power_mw, PowerMw ceiling) {
    int ci = idx->cluster_index(slot.cluster_id);
    if (ci < 0) return false;
    if (used[ci] + slot.core_count > idx->cluster_units[ci]) return false;
    int di = idx->cluster_domain[ci];
    if (domain_freq[di] != 0 && domain_freq[di] != slot.freq_mhz) return false;
    int rider = (idx->cluster_is_npu[ci] && idx->rider_cluster >= 0) ? idx->rider_cluster : -1;
    if (rider >= 0 && used[rider] + 1 > idx->cluster_units[rider]) return false;
    if (power + power_mw > ceiling) return false;
    used[ci] += slot.core_count;
    if (rider >= 0) used[rider] += 1;
    domain_freq[di] = slot.freq_mhz;
    power += power_mw;
    return true;
  }

  bool fits(const ResourceSlot& slot, PowerMw power_mw, PowerMw ceiling) const {
    Ledger probe = *this;
    return probe.try_add(slot, power_mw, ceiling);
  }
};

struct Candidate {
  const OperatingPoint* point;
};

/// Per-workload candidate lists plus derived priority order. The index
/// lives behind a unique_ptr so the ledger's pointer survives moves.
struct Workspace {
  std::vector<std::size_t> priority;               // indices into problem.dnns
  std::vector<std::vector<Candidate>> candidates;  // parallel to priority
  std::unique_ptr<PlatformIndex> index;
  Ledger base;                                     // opaques pre-committed
  std::vector<std::string> opaque_infeasible;

  explicit Workspace(const PlatformSpec& platform)
      : index(std::make_unique<PlatformIndex>(platform)), base(*index) {}
};

std::vector<std::size_t> priority_order(const std::vector<AllocRequest>& dnns) {
  std::vector<std::size_t> order(dnns.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ta = dnns[a].budgets.t_max_ms;
    const auto& tb = dnns[b].budgets.t_max_ms;
    if (ta && tb) return *ta < *tb;
    return ta.has_value() && !tb.has_value();  // bounded before unbounded
  });
  return order;
}

Workspace prepare(const AllocProblem& problem) {
  if (!problem.platform) throw UsageError("allocate: no platform");
  Workspace ws(*problem.platform);
  ws.priority = priority_order(problem.dnns);

  // Fixed co-runners are constraints, not choices: commit them first. A
  // demand that cannot fit next to earlier opaques is reported, never fatal.
  // Opaque power counts against the ceiling but is not subject to it: the
  // governor cannot turn an opaque workload down, so it is added outside the
  // ceiling check.
  PowerMw unbounded = PowerMw::from_raw(std::numeric_limits<std::int64_t>::max());
  for (const auto& opaque : problem.opaques) {
    if (ws.base.try_add(opaque.slot, PowerMw{}, unbounded))
      ws.base.power += opaque.power_mw;
    else
      ws.opaque_infeasible.push_back(opaque.id);
  }

  for (std::size_t pos : ws.priority) {
    const auto& request = problem.dnns[pos];
    if (!request.table) throw UsageError("allocate: workload '" + request.id + "' has no table");
    std::vector<Candidate> list;
    for (const auto& p : request.table->points()) {
      if (p.workload_id != request.id) continue;
      if (request.budgets.admits(p)) list.push_back({&p});
    }
    std::sort(list.begin(), list.end(), [](const Candidate& a, const Candidate& b) {
      return point_better(*a.point, *b.point);
    });
    ws.candidates.push_back(std::move(list));
  }
  return ws;
}

std::uint64_t joint_space(const Workspace& ws, std::uint64_t limit) {
  std::uint64_t space = 1;
  for (const auto& list : ws.candidates) {
    space *= static_cast<std::uint64_t>(list.size()) + 1;
    if (space > limit) return limit + 1;
  }
  return space;
}

/// A complete labeling: chosen candidate index per priority position, -1 for
/// unserved.
using Labeling = std::vector<int>;

/// Lexicographic objective: served beats unserved, then higher accuracy, in
/// priority order; full per-point tie-break chain afterwards.
bool labeling_better(const Workspace& ws, const Labeling& a, const Labeling& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool ha = a[i] >= 0, hb = b[i] >= 0;
    if (ha != hb) return ha;
    if (!ha) continue;
    const auto& pa = *ws.candidates[i][a[i]].point;
    const auto& pb = *ws.candidates[i][b[i]].point;
    if (pa.accuracy_pct != pb.accuracy_pct) return pa.accuracy_pct > pb.accuracy_pct;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || b[i] < 0 || a[i] == b[i]) continue;
    const auto& pa = *ws.candidates[i][a[i]].point;
    const auto& pb = *ws.candidates[i][b[i]].point;
    if (pa != pb) return point_better(pa, pb);
  }
  return false;
}

void exhaustive_search(const Workspace& ws, PowerMw ceiling, std::size_t depth, const Ledger& ledger,
                       Labeling& current, Labeling& best, bool& have_best) {
  if (depth == ws.candidates.size()) {
    if (!have_best || labeling_better(ws, current, best)) {
      best = current;
      have_best = true;
    }
    return;
  }
  const auto& list = ws.candidates[depth];
  for (int i = 0; i < static_cast<int>(list.size()); ++i) {
    Ledger next = ledger;
    if (!next.try_add(list[i].point->resource, list[i].point->power_mw, ceiling)) continue;
    current[depth] = i;
    exhaustive_search(ws, ceiling, depth + 1, next, current, best, have_best);
  }
  current[depth] = -1;
  exhaustive_search(ws, ceiling, depth + 1, ledger, current, best, have_best);
}

Decision decision_from_labeling(const AllocProblem& problem, const Workspace& ws,
                                const Labeling& labeling) {
  Decision decision;
  for (std::size_t i = 0; i < ws.priority.size(); ++i) {
    const auto& request = problem.dnns[ws.priority[i]];
    if (labeling[i] >= 0)
      decision.assignments.emplace(request.id, *ws.candidates[i][labeling[i]].point);
    else
      decision.infeasible.push_back(request.id);
  }
  for (const auto& id : ws.opaque_infeasible) decision.infeasible.push_back(id);

  for (std::size_t i = 0; i < ws.priority.size(); ++i) {
    const auto& request = problem.dnns[ws.priority[i]];
    auto it = decision.assignments.find(request.id);
    if (it == decision.assignments.end()) {
      decision.rationale.push_back("infeasible:" + request.id);
    } else {
      const auto& p = it->second;
      decision.rationale.push_back("assign:" + request.id + ":" + p.resource.cluster_id + "x" +
                                   std::to_string(p.resource.core_count) + "@" +
                                   std::to_string(p.resource.freq_mhz) + ":L" + p.config_pct.str());
    }
  }
  for (const auto& opaque : problem.opaques) {
    bool rejected = std::find(ws.opaque_infeasible.begin(), ws.opaque_infeasible.end(), opaque.id) !=
                    ws.opaque_infeasible.end();
    decision.rationale.push_back((rejected ? "infeasible:" : "opaque:") + opaque.id);
  }
  return decision;
}

Labeling greedy_with_repair(const AllocProblem& problem, const Workspace& ws) {
  const PowerMw ceiling = problem.power_ceiling_mw;
  const PowerMw unbounded = PowerMw::from_raw(std::numeric_limits<std::int64_t>::max());
  Labeling labeling(ws.candidates.size(), -1);

  // First pass: per-workload budgets and resource constraints only; the
  // global ceiling is enforced by the repair pass below.
  Ledger ledger = ws.base;
  for (std::size_t i = 0; i < ws.candidates.size(); ++i) {
    const auto& list = ws.candidates[i];
    for (int c = 0; c < static_cast<int>(list.size()); ++c) {
      Ledger next = ledger;
      if (next.try_add(list[c].point->resource, list[c].point->power_mw, unbounded)) {
        labeling[i] = c;
        ledger = next;
        break;
      }
    }
  }

  auto rebuild_without = [&](std::size_t skip) {
    Ledger rebuilt = ws.base;
    for (std::size_t i = 0; i < labeling.size(); ++i) {
      if (i == skip || labeling[i] < 0) continue;
      const auto& p = *ws.candidates[i][labeling[i]].point;
      rebuilt.try_add(p.resource, p.power_mw, unbounded);
    }
    return rebuilt;
  };

  // Repair: while the ceiling is exceeded, step the lowest-priority served
  // workload down its ladder (re-selecting the best point below its current
  // level that fits the remaining headroom), dropping it when the ladder is
  // exhausted.
  while (ledger.power > ceiling) {
    int victim = -1;
    for (int i = static_cast<int>(labeling.size()) - 1; i >= 0; --i) {
      if (labeling[i] >= 0) {
        victim = i;
        break;
      }
    }
    if (victim < 0) break;  // only opaque power remains; nothing to turn down

    const auto& list = ws.candidates[victim];
    Percent current_level = list[labeling[victim]].point->config_pct;
    Ledger others = rebuild_without(victim);

    int replacement = -1;
    for (int c = 0; c < static_cast<int>(list.size()); ++c) {
      if (list[c].point->config_pct >= current_level) continue;
      if (others.fits(list[c].point->resource, list[c].point->power_mw, ceiling)) {
        replacement = c;
        break;  // candidates are sorted best-first
      }
    }
    labeling[victim] = replacement;
    ledger = rebuild_without(labeling.size());  // rebuild with all current picks
  }
  return labeling;
}

} // namespace

std::optional<OperatingPoint> select_point(const OperatingPointTable& table, const Budgets& budgets,
                                           const std::set<ResourceSlot>& available) {
  if (!budgets.any_bound())
    throw UsageError("select_point: a selection query needs at least one finite budget bound");
  const OperatingPoint* best = nullptr;
  for (const auto& p : table.points()) {
    if (!available.contains(p.resource)) continue;
    if (!budgets.admits(p)) continue;
    if (!best || point_better(p, *best)) best = &p;
  }
  if (!best) return std::nullopt;
  return *best;
}

Decision allocate_all(const AllocProblem& problem) {
  Workspace ws = prepare(problem);
  if (joint_space(ws, kExhaustiveSpaceLimit) <= kExhaustiveSpaceLimit) {
    Labeling current(ws.candidates.size(), -1);
    Labeling best(ws.candidates.size(), -1);
    bool have_best = false;
    exhaustive_search(ws, problem.power_ceiling_mw, 0, ws.base, current, best, have_best);
    return decision_from_labeling(problem, ws, have_best ? best : Labeling(ws.candidates.size(), -1));
  }
  return decision_from_labeling(problem, ws, greedy_with_repair(problem, ws));
}

Decision brute_force_allocate(const AllocProblem& problem) {
  Workspace ws = prepare(problem);
  std::uint64_t space = joint_space(ws, kBruteForceSpaceLimit);
  if (space > kBruteForceSpaceLimit)
    throw UsageError("brute_force_allocate: joint space exceeds " +
                     std::to_string(kBruteForceSpaceLimit) + " combinations");

  const std::size_t n = ws.candidates.size();
  Labeling odometer(n, -1);
  Labeling best(n, -1);
  bool have_best = false;
  while (true) {
    // validate the complete labeling from scratch
    Ledger ledger = ws.base;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (odometer[i] < 0) continue;
      const auto& p = *ws.candidates[i][odometer[i]].point;
      ok = ledger.try_add(p.resource, p.power_mw, problem.power_ceiling_mw);
    }
    if (ok && (!have_best || labeling_better(ws, odometer, best))) {
      best = odometer;
      have_best = true;
    }
    // advance
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (odometer[i] + 1 < static_cast<int>(ws.candidates[i].size())) {
        ++odometer[i];
        break;
      }
      odometer[i] = -1;
    }
    if (i == n) break;
  }
  return decision_from_labeling(problem, ws, have_best ? best : Labeling(n, -1));
}

Decision handle_event(std::string_view trigger_tag, const AllocProblem& problem) {
  Decision decision = allocate_all(problem);
  decision.rationale.insert(decision.rationale.begin(), std::string(trigger_tag));
  return decision;
}

std::pair<Knobs, Decision> control_step(const AllocProblem& problem, const Monitors& monitors,
                                        const Knobs& current) {
  (void)monitors;  // informational; the problem already carries current budgets/ceiling
  Decision decision = allocate_all(problem);
  if (decision.assignments == current.settings) return {current, decision};
  Knobs next;
  next.settings = decision.assignments;
  return {next, decision};
}

Monitors monitors_of(const Decision& decision, PowerMw total_power, PowerMw ceiling) {
  Monitors monitors;
  for (const auto& [id, point] : decision.assignments)
    monitors.per_workload.emplace(
        id, Monitors::Achieved{point.exec_time_ms, point.energy_mj, point.accuracy_pct});
  monitors.total_power_mw = total_power;
  monitors.power_budget_mw = ceiling;
  return monitors;
}

} // namespace edgertm
