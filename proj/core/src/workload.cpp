#include "edgertm/workload.hpp"

#include <algorithm>
#include <cstdlib>

#include "edgertm/errors.hpp"

namespace edgertm {

std::vector<Percent> default_config_ladder() {
  return {Percent::from_int(25), Percent::from_int(50), Percent::from_int(75),
          Percent::from_int(100)};
}

void DnnWorkload::validate() {
  if (id.empty()) throw InvariantError("workload with empty id");
  if (config_ladder.empty()) throw InvariantError("workload '" + id + "': empty config ladder");
  for (std::size_t i = 0; i < config_ladder.size(); ++i) {
    if (!config_ladder[i].is_positive() || config_ladder[i] > Percent::from_int(100))
      throw InvariantError("workload '" + id + "': ladder levels must be in (0,100]");
    if (i > 0 && config_ladder[i] <= config_ladder[i - 1])
      throw InvariantError("workload '" + id + "': ladder must be strictly ascending");
  }
  Percent previous;
  bool have_previous = false;
  for (const auto& level : config_ladder) {
    auto it = accuracy_by_level.find(level);
    if (it == accuracy_by_level.end()) continue;
    if (have_previous && it->second < previous)
      throw InvariantError("workload '" + id + "': accuracy decreases at level " + level.str());
    previous = it->second;
    have_previous = true;
  }
  if (exit_ms && *exit_ms <= arrival_ms)
    throw InvariantError("workload '" + id + "': exit_ms must be after arrival_ms");
  if (reconfig.switch_time_ms.is_negative() || reconfig.switch_energy_mj.is_negative())
    throw InvariantError("workload '" + id + "': reconfiguration costs must be >= 0");
  if (active_level.is_zero()) active_level = config_ladder.back();
  if (!on_ladder(active_level))
    throw InvariantError("workload '" + id + "': active level off the ladder");
}

bool DnnWorkload::on_ladder(Percent level) const {
  return std::find(config_ladder.begin(), config_ladder.end(), level) != config_ladder.end();
}

int DnnWorkload::rank_of(Percent level) const {
  auto it = std::find(config_ladder.begin(), config_ladder.end(), level);
  if (it == config_ladder.end())
    throw UsageError("workload '" + id + "': level " + level.str() + " is not on the ladder");
  return static_cast<int>(it - config_ladder.begin());
}

Percent DnnWorkload::accuracy_at(Percent level) const {
  auto it = accuracy_by_level.find(level);
  if (it == accuracy_by_level.end())
    throw UsageError("workload '" + id + "': no accuracy recorded for level " + level.str());
  return it->second;
}

bool alive_at(const DnnWorkload& w, std::int64_t at_ms) {
  return at_ms >= w.arrival_ms && (!w.exit_ms || at_ms < *w.exit_ms);
}

bool alive_at(const OpaqueWorkload& w, std::int64_t at_ms) {
  return at_ms >= w.arrival_ms && (!w.exit_ms || at_ms < *w.exit_ms);
}

DnnWorkload scale(const DnnWorkload& workload, Percent level) {
  if (!workload.on_ladder(level))
    throw UsageError("scale: level " + level.str() + " is not on the ladder of '" + workload.id + "'");
  DnnWorkload scaled = workload;
  scaled.active_level = level;
  return scaled;
}

std::pair<TimeMs, EnergyMj> switch_cost(const std::vector<Percent>& ladder, Percent from_level,
                                        Percent to_level, const ReconfigCost& cost) {
  auto rank = [&](Percent level) {
    auto it = std::find(ladder.begin(), ladder.end(), level);
    if (it == ladder.end())
      throw UsageError("switch_cost: level " + level.str() + " is not on the ladder");
    return static_cast<std::int64_t>(it - ladder.begin());
  };
  std::int64_t distance = std::llabs(rank(from_level) - rank(to_level));
  return {cost.switch_time_ms * distance, cost.switch_energy_mj * distance};
}

DemandDescriptor active_demand(const DnnWorkload& w, std::int64_t at_ms) {
  if (!alive_at(w, at_ms))
    throw LifecycleError("workload '" + w.id + "' is not alive at " + std::to_string(at_ms) + " ms");
  return {.governor_chosen = true, .slot = std::nullopt};
}

DemandDescriptor active_demand(const OpaqueWorkload& w, std::int64_t at_ms) {
  if (!alive_at(w, at_ms))
    throw LifecycleError("workload '" + w.id + "' is not alive at " + std::to_string(at_ms) + " ms");
  return {.governor_chosen = false, .slot = w.fixed_demand};
}

void bind_table(DnnWorkload& workload, const OperatingPointTable& table) {
  auto ids = table.workload_ids();
  if (ids.size() != 1 || ids.front() != workload.id)
    throw InvariantError("workload '" + workload.id + "': table does not contain exactly this workload");
  auto levels = table.ladder(workload.id);
  if (levels != workload.config_ladder)
    throw InvariantError("workload '" + workload.id +
                         "': config ladder does not match the table's level set");
  workload.accuracy_by_level.clear();
  for (const auto& p : table.points())
    workload.accuracy_by_level[p.config_pct] = p.accuracy_pct;
  workload.validate();
}

} // namespace edgertm
