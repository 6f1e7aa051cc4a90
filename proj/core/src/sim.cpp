#include "edgertm/sim.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "edgertm/errors.hpp"
#include "edgertm/governor.hpp"
#include "edgertm/platform.hpp"

namespace edgertm {

namespace {

struct SimState {
  const Scenario* scenario = nullptr;
  PlatformState platform_state;
  PowerMw ceiling;
  std::map<std::string, Budgets> budgets;          // current, per dnn id
  std::map<std::string, OperatingPoint> assigned;  // currently actuated points
  std::map<std::string, Percent> last_level;       // survives unserved gaps
  Knobs knobs;
};

std::vector<ScenarioEvent> unified_events(const Scenario& scenario) {
  std::vector<ScenarioEvent> events = scenario.scripted_events;
  int synth_index = static_cast<int>(events.size());
  auto add = [&](std::int64_t at, ScenarioEvent::Kind kind, const std::string& id) {
    ScenarioEvent e;
    e.at_ms = at;
    e.kind = kind;
    e.workload_id = id;
    e.declaration_index = synth_index++;
    events.push_back(std::move(e));
  };
  for (const auto& w : scenario.dnns) {
    add(w.arrival_ms, ScenarioEvent::Kind::arrival, w.id);
    if (w.exit_ms) add(*w.exit_ms, ScenarioEvent::Kind::exit_, w.id);
  }
  for (const auto& w : scenario.opaques) {
    add(w.arrival_ms, ScenarioEvent::Kind::arrival, w.id);
    if (w.exit_ms) add(*w.exit_ms, ScenarioEvent::Kind::exit_, w.id);
  }
  std::sort(events.begin(), events.end(), event_order_less);
  return events;
}

AllocProblem build_problem(const SimState& sim, std::int64_t at_ms) {
  AllocProblem problem;
  problem.platform = &sim.scenario->platform;
  problem.power_ceiling_mw = sim.ceiling;
  for (const auto& w : sim.scenario->dnns) {
    if (!alive_at(w, at_ms)) continue;
    problem.dnns.push_back({w.id, sim.budgets.at(w.id), &sim.scenario->tables.at(w.id)});
  }
  for (const auto& w : sim.scenario->opaques) {
    if (!alive_at(w, at_ms)) continue;
    problem.opaques.push_back({w.id, w.fixed_demand, w.fixed_power_mw});
  }
  return problem;
}

Monitors current_monitors(const SimState& sim) {
  Monitors monitors;
  for (const auto& [id, point] : sim.assigned)
    monitors.per_workload.emplace(
        id, Monitors::Achieved{point.exec_time_ms, point.energy_mj, point.accuracy_pct});
  monitors.total_power_mw = sim.platform_state.total_power_mw();
  monitors.power_budget_mw = sim.ceiling;
  return monitors;
}

/// Moves the platform to the decision's allocation: releases first (changed
/// and departed holders, scalable and opaque alike), then allocates opaques
/// and the new assignments. The governor already proved the target state
/// consistent, so a fixed release-then-allocate order suffices.
void apply_decision(SimState& sim, std::int64_t at_ms, const Decision& decision) {
  const PlatformSpec& spec = sim.scenario->platform;
  std::set<std::string> rejected(decision.infeasible.begin(), decision.infeasible.end());

  for (auto it = sim.assigned.begin(); it != sim.assigned.end();) {
    auto kept = decision.assignments.find(it->first);
    if (kept == decision.assignments.end() || !(kept->second == it->second)) {
      if (sim.platform_state.owns_anything(it->first))
        sim.platform_state = sim.platform_state.with_release(spec, it->first);
      it = sim.assigned.erase(it);
    } else {
      ++it;
    }
  }
  for (const auto& w : sim.scenario->opaques) {
    bool should_hold = alive_at(w, at_ms) && !rejected.count(w.id);
    if (sim.platform_state.owns_anything(w.id) && !should_hold)
      sim.platform_state = sim.platform_state.with_release(spec, w.id);
  }

  for (const auto& w : sim.scenario->opaques) {
    bool should_hold = alive_at(w, at_ms) && !rejected.count(w.id);
    if (should_hold && !sim.platform_state.owns_anything(w.id)) {
      const ClusterSpec* cluster = spec.find_cluster(w.fixed_demand.cluster_id);
      if (sim.platform_state.domain_frequency(cluster->domain_id) != w.fixed_demand.freq_mhz)
        sim.platform_state =
            sim.platform_state.with_frequency(spec, cluster->domain_id, w.fixed_demand.freq_mhz);
      sim.platform_state = sim.platform_state.with_allocation(spec, w.id, w.fixed_demand);
    }
  }
  for (const auto& [id, point] : decision.assignments) {
    if (sim.assigned.count(id)) continue;  // kept unchanged
    const ClusterSpec* cluster = spec.find_cluster(point.resource.cluster_id);
    if (sim.platform_state.domain_frequency(cluster->domain_id) != point.resource.freq_mhz)
      sim.platform_state =
          sim.platform_state.with_frequency(spec, cluster->domain_id, point.resource.freq_mhz);
    sim.platform_state = sim.platform_state.with_allocation(spec, id, point.resource);
    sim.assigned.emplace(id, point);
  }
  sim.knobs.settings = decision.assignments;
}

void apply_event(SimState& sim, const ScenarioEvent& event) {
  switch (event.kind) {
    case ScenarioEvent::Kind::power_budget_change:
      sim.ceiling = *event.power_budget_mw;
      break;
    case ScenarioEvent::Kind::budget_change:
      sim.budgets.at(event.workload_id) = *event.budgets;
      break;
    case ScenarioEvent::Kind::accuracy_requirement_change:
      sim.budgets.at(event.workload_id).acc_min_pct = *event.acc_min_pct;
      break;
    case ScenarioEvent::Kind::arrival:
    case ScenarioEvent::Kind::exit_:
      break;  // liveness is evaluated from the workload windows
  }
}

struct EmitResult {
  bool any_infeasible = false;
  bool any_violation = false;
};

/// One trace record per live workload for this governor invocation, plus an
/// exit marker row when the invocation is an exit event.
EmitResult emit_rows(SimState& sim, Trace& trace, std::int64_t at_ms, const std::string& event_tag,
                     const Decision& decision, const std::optional<std::string>& exited_id) {
  EmitResult result;
  std::set<std::string> rejected(decision.infeasible.begin(), decision.infeasible.end());

  PowerMw platform_power;
  for (const auto& [id, point] : decision.assignments) platform_power += point.power_mw;
  for (const auto& w : sim.scenario->opaques)
    if (alive_at(w, at_ms) && !rejected.count(w.id)) platform_power += w.fixed_power_mw;
  sim.platform_state = sim.platform_state.with_total_power(platform_power);

  std::string base_rationale;
  for (const auto& tag : decision.rationale) {
    if (!base_rationale.empty()) base_rationale += ';';
    base_rationale += tag;
  }

  auto dnn_of = [&](const std::string& id) -> const DnnWorkload* {
    for (const auto& w : sim.scenario->dnns)
      if (w.id == id) return &w;
    return nullptr;
  };
  auto opaque_of = [&](const std::string& id) -> const OpaqueWorkload* {
    for (const auto& w : sim.scenario->opaques)
      if (w.id == id) return &w;
    return nullptr;
  };

  for (const auto& id : sim.scenario->declaration_order) {
    const DnnWorkload* dnn = dnn_of(id);
    const OpaqueWorkload* opaque = opaque_of(id);
    bool is_exit_marker = exited_id && *exited_id == id;
    bool live = dnn ? alive_at(*dnn, at_ms) : alive_at(*opaque, at_ms);
    if (!live && !is_exit_marker) continue;

    TraceRecord r;
    r.at_ms = at_ms;
    r.workload_id = id;
    r.platform_power_mw = platform_power;
    r.event_tag = event_tag;
    r.rationale = base_rationale;

    if (is_exit_marker) {
      trace.push_back(std::move(r));
      continue;
    }

    if (dnn) {
      auto it = decision.assignments.find(id);
      if (it == decision.assignments.end()) {
        result.any_infeasible = true;
        trace.push_back(std::move(r));
        continue;
      }
      const OperatingPoint& p = it->second;
      r.config_level = p.config_pct;
      r.cluster = p.resource.cluster_id;
      r.cores = p.resource.core_count;
      r.freq_mhz = p.resource.freq_mhz;
      r.pred_time_ms = p.exec_time_ms;
      r.pred_energy_mj = p.energy_mj;
      r.pred_power_mw = p.power_mw;
      r.accuracy = p.accuracy_pct;

      // A level change charges the reconfiguration cost to this transient
      // row only; steady-state budget checks keep using the point values.
      auto level_it = sim.last_level.find(id);
      if (level_it != sim.last_level.end() && level_it->second != p.config_pct) {
        auto [dt, de] = switch_cost(dnn->config_ladder, level_it->second, p.config_pct, dnn->reconfig);
        r.pred_time_ms = *r.pred_time_ms + dt;
        r.pred_energy_mj = *r.pred_energy_mj + de;
      }
      sim.last_level[id] = p.config_pct;

      const Budgets& budgets = sim.budgets.at(id);
      std::string violations;
      if (budgets.t_max_ms && *r.pred_time_ms > *budgets.t_max_ms)
        violations += ";violation:" + id + ":time";
      if (budgets.e_max_mj && *r.pred_energy_mj > *budgets.e_max_mj)
        violations += ";violation:" + id + ":energy";
      if (budgets.p_max_mw && *r.pred_power_mw > *budgets.p_max_mw)
        violations += ";violation:" + id + ":power";
      if (p.accuracy_pct < budgets.acc_min_pct) violations += ";violation:" + id + ":accuracy";
      if (!violations.empty()) {
        result.any_violation = true;
        r.rationale += violations;
      }
    } else {
      if (rejected.count(id)) {
        result.any_infeasible = true;
        trace.push_back(std::move(r));
        continue;
      }
      r.cluster = opaque->fixed_demand.cluster_id;
      r.cores = opaque->fixed_demand.core_count;
      r.freq_mhz = opaque->fixed_demand.freq_mhz;
      r.pred_power_mw = opaque->fixed_power_mw;
    }
    trace.push_back(std::move(r));
  }
  return result;
}

} // namespace

RunResult run(const Scenario& scenario) {
  scenario.validate();

  SimState sim;
  sim.scenario = &scenario;
  sim.platform_state = PlatformState::initial(scenario.platform);
  sim.ceiling = scenario.platform.power_budget_mw;
  for (const auto& w : scenario.dnns) sim.budgets.emplace(w.id, w.budgets);

  std::vector<ScenarioEvent> events = unified_events(scenario);
  std::map<std::int64_t, std::vector<const ScenarioEvent*>> events_at;
  for (const auto& e : events)
    if (e.at_ms <= scenario.horizon_ms) events_at[e.at_ms].push_back(&e);

  std::vector<std::int64_t> timeline;
  for (std::int64_t t = 0; t <= scenario.horizon_ms; t += scenario.control_quantum_ms)
    timeline.push_back(t);
  for (const auto& [t, _] : events_at) timeline.push_back(t);
  std::sort(timeline.begin(), timeline.end());
  timeline.erase(std::unique(timeline.begin(), timeline.end()), timeline.end());

  RunResult result;
  for (std::int64_t t : timeline) {
    auto ev_it = events_at.find(t);
    if (ev_it != events_at.end()) {
      // Events subsume the quantum tick at the same instant: one governor
      // invocation (and one set of rows) per event.
      for (const ScenarioEvent* event : ev_it->second) {
        apply_event(sim, *event);
        Decision decision = handle_event(event->tag(), build_problem(sim, t));
        apply_decision(sim, t, decision);
        std::optional<std::string> exited;
        if (event->kind == ScenarioEvent::Kind::exit_) exited = event->workload_id;
        EmitResult emitted = emit_rows(sim, result.trace, t, event->tag(), decision, exited);
        result.any_infeasible |= emitted.any_infeasible;
        result.any_budget_violation |= emitted.any_violation;
      }
    } else {
      auto [knobs, decision] = control_step(build_problem(sim, t), current_monitors(sim), sim.knobs);
      if (!(knobs == sim.knobs)) apply_decision(sim, t, decision);
      EmitResult emitted = emit_rows(sim, result.trace, t, "tick", decision, std::nullopt);
      result.any_infeasible |= emitted.any_infeasible;
      result.any_budget_violation |= emitted.any_violation;
    }
  }
  return result;
}

} // namespace edgertm
