#pragma once

#include "edgertm/scenario.hpp"
#include "edgertm/trace.hpp"

namespace edgertm {

struct RunResult {
  Trace trace;
  bool any_infeasible = false;       // some row recorded an unserved workload
  bool any_budget_violation = false; // some row exceeded its budgets
};

/// Replays a scenario deterministically: events in total order, the governor
/// invoked at every event and every control-quantum tick, one trace record
/// per live workload per invocation. A pure function of the scenario value:
/// identical scenarios produce byte-identical traces.
RunResult run(const Scenario& scenario);

} // namespace edgertm
