#include "edgertm/operating_point.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "edgertm/errors.hpp"

namespace edgertm {

namespace {

using PointKey = std::tuple<std::string, Percent, ResourceSlot>;

PointKey key_of(const OperatingPoint& p) {
  return {p.workload_id, p.config_pct, p.resource};
}

int line_for(const std::vector<int>* lines, std::size_t index) {
  if (lines && index < lines->size()) return (*lines)[index];
  return static_cast<int>(index) + 1;
}

void check_fields(const OperatingPoint& p, int line) {
  if (p.workload_id.empty())
    throw InvariantError("row " + std::to_string(line) + ": empty workload_id", line);
  if (!p.config_pct.is_positive() || p.config_pct > Percent::from_int(100))
    throw InvariantError("row " + std::to_string(line) + ": config_pct must be in (0,100]", line);
  if (!p.exec_time_ms.is_positive())
    throw InvariantError("row " + std::to_string(line) + ": time_ms must be > 0", line);
  if (!p.power_mw.is_positive())
    throw InvariantError("row " + std::to_string(line) + ": power_mw must be > 0", line);
  if (!p.energy_mj.is_positive())
    throw InvariantError("row " + std::to_string(line) + ": energy_mj must be > 0", line);
  if (p.accuracy_pct.is_negative() || p.accuracy_pct > Percent::from_int(100))
    throw InvariantError("row " + std::to_string(line) + ": top1_acc must be in [0,100]", line);
  if (p.resource.core_count < 1)
    throw InvariantError("row " + std::to_string(line) + ": cores must be >= 1", line);
  if (p.resource.freq_mhz < 1)
    throw InvariantError("row " + std::to_string(line) + ": freq_mhz must be >= 1", line);

  EnergyMj expected = Fixed3::mul_div_thousand(p.power_mw, p.exec_time_ms);
  if (!within_relative(expected, p.energy_mj, kEnergyGatePermille))
    throw InvariantError("row " + std::to_string(line) + ": energy_mj deviates from power*time by more than " +
                             std::to_string(kEnergyGatePermille / 10) + "% (" + p.energy_mj.str() +
                             " vs " + expected.str() + ")",
                         line);
}

} // namespace

OperatingPointTable OperatingPointTable::build(std::vector<OperatingPoint> points,
                                               const std::vector<int>* source_lines) {
  std::map<PointKey, int> seen;
  for (std::size_t i = 0; i < points.size(); ++i) {
    int line = line_for(source_lines, i);
    check_fields(points[i], line);
    auto [it, inserted] = seen.emplace(key_of(points[i]), line);
    if (!inserted)
      throw DuplicateKeyError("row " + std::to_string(line) + ": duplicate key (" +
                                  points[i].workload_id + ", " + points[i].config_pct.str() + ", " +
                                  points[i].resource.cluster_id + "/" +
                                  std::to_string(points[i].resource.core_count) + "@" +
                                  std::to_string(points[i].resource.freq_mhz) +
                                  "), first at row " + std::to_string(it->second),
                              line);
  }

  // Monotone scaling contract: per (workload, resource), accuracy and time
  // non-decreasing in config level. Also accuracy uniform per (workload,
  // level) across resources: accuracy is a property of the configuration.
  std::map<std::pair<std::string, ResourceSlot>, std::vector<std::size_t>> by_resource;
  std::map<std::pair<std::string, Percent>, std::pair<Percent, int>> level_accuracy;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    by_resource[{p.workload_id, p.resource}].push_back(i);
    auto key = std::make_pair(p.workload_id, p.config_pct);
    auto it = level_accuracy.find(key);
    int line = line_for(source_lines, i);
    if (it == level_accuracy.end()) {
      level_accuracy.emplace(key, std::make_pair(p.accuracy_pct, line));
    } else if (it->second.first != p.accuracy_pct) {
      throw InvariantError("row " + std::to_string(line) + ": accuracy " + p.accuracy_pct.str() +
                               " differs from " + it->second.first.str() + " (row " +
                               std::to_string(it->second.second) + ") at the same config level",
                           line);
    }
  }
  for (auto& [key, idxs] : by_resource) {
    std::sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
      return points[a].config_pct < points[b].config_pct;
    });
    for (std::size_t j = 1; j < idxs.size(); ++j) {
      const auto& lo = points[idxs[j - 1]];
      const auto& hi = points[idxs[j]];
      int line = line_for(source_lines, idxs[j]);
      if (hi.exec_time_ms < lo.exec_time_ms)
        throw InvariantError("row " + std::to_string(line) + ": exec time decreases from level " +
                                 lo.config_pct.str() + " to " + hi.config_pct.str() +
                                 " on the same resource",
                             line);
      if (hi.accuracy_pct < lo.accuracy_pct)
        throw InvariantError("row " + std::to_string(line) + ": accuracy decreases from level " +
                                 lo.config_pct.str() + " to " + hi.config_pct.str(),
                             line);
    }
  }

  OperatingPointTable table;
  table.points_ = std::move(points);
  return table;
}

const OperatingPoint* OperatingPointTable::find(const std::string& workload_id, Percent config_pct,
                                                const ResourceSlot& resource) const {
  for (const auto& p : points_) {
    if (p.workload_id == workload_id && p.config_pct == config_pct && p.resource == resource)
      return &p;
  }
  return nullptr;
}

std::vector<std::string> OperatingPointTable::workload_ids() const {
  std::vector<std::string> ids;
  for (const auto& p : points_) ids.push_back(p.workload_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<Percent> OperatingPointTable::ladder(const std::string& workload_id) const {
  std::vector<Percent> levels;
  for (const auto& p : points_)
    if (p.workload_id == workload_id) levels.push_back(p.config_pct);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

std::vector<ResourceSlot> OperatingPointTable::slots(const std::string& workload_id) const {
  std::vector<ResourceSlot> out;
  for (const auto& p : points_)
    if (p.workload_id == workload_id) out.push_back(p.resource);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

OperatingPointTable OperatingPointTable::for_workload(const std::string& workload_id) const {
  OperatingPointTable out;
  for (const auto& p : points_)
    if (p.workload_id == workload_id) out.points_.push_back(p);
  return out;
}

EnergyMj energy_of(PowerMw power_mw, TimeMs time_ms) {
  if (!power_mw.is_positive() || !time_ms.is_positive())
    throw DomainError("energy_of: power and time must be > 0");
  return Fixed3::mul_div_thousand(power_mw, time_ms);
}

bool dominates(const OperatingPoint& a, const OperatingPoint& b) {
  if (a.workload_id != b.workload_id)
    throw UsageError("dominates: points belong to different workloads (" + a.workload_id + " vs " +
                     b.workload_id + ")");
  bool no_worse = a.exec_time_ms <= b.exec_time_ms && a.energy_mj <= b.energy_mj &&
                  a.power_mw <= b.power_mw && a.accuracy_pct >= b.accuracy_pct;
  bool strictly_better = a.exec_time_ms < b.exec_time_ms || a.energy_mj < b.energy_mj ||
                         a.power_mw < b.power_mw || a.accuracy_pct > b.accuracy_pct;
  return no_worse && strictly_better;
}

OperatingPointTable pareto_frontier(const OperatingPointTable& table) {
  const auto& pts = table.points();
  if (pts.empty()) return {};
  for (const auto& p : pts)
    if (p.workload_id != pts.front().workload_id)
      throw UsageError("pareto_frontier: table mixes workload ids");

  std::vector<const OperatingPoint*> kept;
  for (const auto& candidate : pts) {
    bool dominated = false;
    for (const auto& other : pts) {
      if (&other == &candidate) continue;
      if (dominates(other, candidate)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(&candidate);
  }
  std::sort(kept.begin(), kept.end(), [](const OperatingPoint* a, const OperatingPoint* b) {
    return std::tie(a->exec_time_ms, a->energy_mj, a->resource, a->config_pct) <
           std::tie(b->exec_time_ms, b->energy_mj, b->resource, b->config_pct);
  });
  // Duplicate points (same key) were rejected at build; equal metric tuples
  // of distinct keys are kept and ordered by the resource key above.
  std::vector<OperatingPoint> out;
  out.reserve(kept.size());
  for (const auto* p : kept) out.push_back(*p);
  return OperatingPointTable::build(std::move(out));
}

OperatingPointTable feasible_points(const OperatingPointTable& table, const Budgets& budgets) {
  std::vector<OperatingPoint> out;
  for (const auto& p : table.points())
    if (budgets.admits(p)) out.push_back(p);
  return OperatingPointTable::build(std::move(out));
}

} // namespace edgertm
