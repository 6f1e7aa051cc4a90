// Acceptance suite: one pass/fail line per criterion, non-zero exit when any
// criterion fails. Run via ctest (-R acceptance) or directly.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "edgertm/errors.hpp"
#include "edgertm/governor.hpp"
#include "edgertm/platform.hpp"
#include "edgertm/scenario.hpp"
#include "edgertm/sim.hpp"
#include "edgertm/table_io.hpp"
#include "edgertm/trace.hpp"
#include "edgertm/workload.hpp"
#include "support/test_support.hpp"

using namespace edgertm;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
  int number;
  std::string name;
  std::function<std::string()> check;  // returns "" on pass, else the failure detail
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string require(bool condition, const std::string& detail) {
  return condition ? "" : detail;
}

// ---------------------------------------------------------------------------
// 1. Energy consistency of the bundled measurement rows.
std::string criterion_energy_consistency() {
  auto start = Clock::now();
  auto table = load_table(test::data_file("table1.csv"));
  if (table.size() != 10) return "expected 10 rows, got " + std::to_string(table.size());

  int within_one_percent = 0;
  for (const auto& p : table.points()) {
    EnergyMj computed = energy_of(p.power_mw, p.exec_time_ms);
    if (!within_relative(computed, p.energy_mj, 50))
      return "row for " + p.resource.cluster_id + "@" + std::to_string(p.resource.freq_mhz) +
             " deviates beyond 5%";
    if (within_relative(computed, p.energy_mj, 10)) ++within_one_percent;
  }
  if (within_one_percent < 9)
    return "only " + std::to_string(within_one_percent) + " rows within 1% (need >= 9)";
  double elapsed = seconds_since(start);
  if (elapsed >= 1.0) return "took " + std::to_string(elapsed) + " s (limit 1 s)";
  return "";
}

// ---------------------------------------------------------------------------
// 2. Built-in ladder counts plus the coupling/exclusivity property under
//    randomized operation sequences.
std::string criterion_platform_ladders() {
  auto spec = builtin_platform("odroid-xu3");
  if (spec.find_cluster("a15")->freq_levels_mhz.size() != 17) return "a15 ladder is not 17 levels";
  if (spec.find_cluster("a7")->freq_levels_mhz.size() != 12) return "a7 ladder is not 12 levels";

  auto soc = builtin_platform("generic-npu-soc");
  test::Rng rng(101);
  auto state = PlatformState::initial(soc);
  std::vector<std::string> owners = {"w0", "w1", "w2", "w3", "w4", "w5"};
  auto domains = soc.domain_ids();

  for (int step = 0; step < 10000; ++step) {
    int action = static_cast<int>(rng.range(0, 2));
    try {
      if (action == 0) {
        const auto& domain = domains[rng.range(0, domains.size() - 1)];
        auto levels = soc.domain_levels(domain);
        state = state.with_frequency(soc, domain, levels[rng.range(0, levels.size() - 1)]);
      } else if (action == 1) {
        const auto& cluster = soc.clusters[rng.range(0, soc.clusters.size() - 1)];
        ResourceSlot slot{cluster.id, static_cast<int>(rng.range(1, cluster.units())),
                          state.domain_frequency(cluster.domain_id)};
        state = state.with_allocation(soc, owners[rng.range(0, owners.size() - 1)], slot);
      } else {
        state = state.with_release(soc, owners[rng.range(0, owners.size() - 1)]);
      }
    } catch (const ContentionError&) {
    } catch (const UsageError&) {
    }

    for (const auto& domain : domains) {
      int freq = state.domain_frequency(domain);
      for (const auto& cluster_id : soc.clusters_in_domain(domain))
        if (state.cluster_frequency(soc, cluster_id) != freq)
          return "coupling broken in domain " + domain + " at step " + std::to_string(step);
    }
    for (const auto& cluster : soc.clusters) {
      int sum = 0;
      for (const auto& [owner, units] : state.holdings(cluster.id)) sum += units;
      if (sum != state.used_units(cluster.id) || sum > cluster.units())
        return "occupancy accounting broken on " + cluster.id + " at step " + std::to_string(step);
    }
  }
  return "";
}

// ---------------------------------------------------------------------------
// 3. The two published budget decisions replay as unique optima.
std::string criterion_decision_replay() {
  auto table = load_table(test::data_file("casestudy.csv"));
  std::set<ResourceSlot> available;
  for (const auto& p : table.points()) available.insert(p.resource);

  struct Expected {
    std::int64_t t_ms, e_mj;
    Percent level;
    ResourceSlot slot;
  };
  std::vector<Expected> cases = {
      {400, 100, Percent::from_int(100), {"a7", 4, 900}},
      {200, 150, Percent::from_int(75), {"a15", 4, 1000}},
  };
  for (const auto& expected : cases) {
    Budgets budgets;
    budgets.t_max_ms = Fixed3::from_int(expected.t_ms);
    budgets.e_max_mj = Fixed3::from_int(expected.e_mj);
    auto chosen = select_point(table, budgets, available);
    if (!chosen) return "no point for (" + std::to_string(expected.t_ms) + " ms, " +
                        std::to_string(expected.e_mj) + " mJ)";
    if (chosen->config_pct != expected.level || !(chosen->resource == expected.slot))
      return "picked " + chosen->resource.cluster_id + "@" +
             std::to_string(chosen->resource.freq_mhz) + " L" + chosen->config_pct.str() +
             " for (" + std::to_string(expected.t_ms) + "," + std::to_string(expected.e_mj) + ")";
    // uniqueness at the accuracy+energy stage of the tie-break chain
    int ties = 0;
    for (const auto& p : feasible_points(table, budgets).points())
      if (p.accuracy_pct == chosen->accuracy_pct && p.energy_mj == chosen->energy_mj) ++ties;
    if (ties != 1) return "optimum not unique: " + std::to_string(ties) + " ties";
  }
  return "";
}

// ---------------------------------------------------------------------------
// 4. Staged contention replay with checkpoint, violation and exclusivity
//    assertions over the whole trace.
std::string criterion_fig2_replay() {
  auto scenario = load_scenario(test::scenario_file("fig2.json"));
  auto result = run(scenario);
  if (result.any_budget_violation) return "budget violation recorded in the trace";
  if (result.any_infeasible) return "infeasible row recorded in the trace";

  auto a = checkpoint(result.trace, 1000);
  if (!a.count("dnn-1") || a.at("dnn-1").cluster != "npu")
    return "1 s: dnn-1 not on the NPU";
  auto rider = scenario.platform.npu_rider_cluster();
  if (!rider) return "platform has no rider cluster";

  auto b = checkpoint(result.trace, 10000);
  if (!b.count("dnn-2") || b.at("dnn-2").cluster != "npu") return "10 s: dnn-2 not on the NPU";
  if (!b.count("dnn-1") || b.at("dnn-1").cluster != "gpu") return "10 s: dnn-1 not on the GPU";
  if (!(*b.at("dnn-1").config_level < *a.at("dnn-1").config_level))
    return "10 s: dnn-1 level did not drop";

  auto c = checkpoint(result.trace, 20000);
  if (c.at("dnn-1").cluster != "big" || c.at("dnn-1").cores != 1)
    return "20 s: dnn-1 not on one big core";
  if (!(*c.at("dnn-1").config_level < *b.at("dnn-1").config_level))
    return "20 s: dnn-1 level did not drop further";
  if (c.at("dnn-1").platform_power_mw > Fixed3::from_int(5500))
    return "20 s: platform power above the scripted ceiling";

  auto d = checkpoint(result.trace, 30000);
  if (d.at("dnn-1").cluster != "npu" || d.at("dnn-2").cluster != "npu")
    return "30 s: the two scalable workloads are not co-resident on the NPU";

  // exclusivity (rider included) and the platform-power column at every record
  std::map<std::pair<std::int64_t, std::string>, std::vector<const TraceRecord*>> groups;
  for (const auto& r : result.trace) groups[{r.at_ms, r.event_tag}].push_back(&r);
  for (const auto& [key, rows] : groups) {
    std::map<std::string, int> used;
    Fixed3 power_sum;
    for (const auto* r : rows) {
      if (!r->assigned()) continue;
      used[r->cluster] += *r->cores;
      if (scenario.platform.find_cluster(r->cluster)->kind == ClusterKind::npu) used[*rider] += 1;
      if (r->pred_power_mw) power_sum += *r->pred_power_mw;
    }
    for (const auto& [cluster_id, units] : used)
      if (units > scenario.platform.find_cluster(cluster_id)->units())
        return "exclusivity broken on " + cluster_id + " at " + std::to_string(key.first) + " ms";
    for (const auto* r : rows)
      if (!(r->platform_power_mw == power_sum))
        return "platform_power_mw mismatch at " + std::to_string(key.first) + " ms";
  }
  return "";
}

// ---------------------------------------------------------------------------
// 5. Implementation-versus-oracle equivalence at scale.
std::string criterion_oracle_equivalence() {
  auto start = Clock::now();

  // pareto_frontier against an independent pairwise-dominance scan
  test::Rng rng(211);
  for (int iter = 0; iter < 100; ++iter) {
    // up to 512 points: wide resource spread, four levels
    std::vector<OperatingPoint> points;
    int resources = static_cast<int>(rng.range(1, 128));
    // accuracy is a property of the configuration level, shared by resources
    std::vector<Fixed3> level_accuracy;
    Fixed3 acc = rng.fixed(40'000, 60'000);
    for (int l = 0; l < 4; ++l) {
      level_accuracy.push_back(acc);
      acc += rng.fixed(0, 5'000);
      if (acc > Percent::from_int(100)) acc = Percent::from_int(100);
    }
    for (int r = 0; r < resources; ++r) {
      ResourceSlot slot{std::string("c") + std::to_string(static_cast<int>(rng.range(0, 7))),
                        static_cast<int>(rng.range(1, 4)),
                        static_cast<int>(rng.range(2, 18)) * 100};
      Fixed3 time = rng.fixed(5'000, 500'000);
      for (int l = 1; l <= 4; ++l) {
        OperatingPoint p;
        p.workload_id = "oracle-dnn";
        p.platform = "synthetic";
        p.config_pct = Percent::from_int(25 * l);
        p.resource = slot;
        p.exec_time_ms = time;
        p.power_mw = rng.fixed(50'000, 3'000'000);
        p.energy_mj = Fixed3::mul_div_thousand(p.power_mw, p.exec_time_ms);
        p.accuracy_pct = level_accuracy[l - 1];
        bool duplicate = false;
        for (const auto& q : points)
          if (q.config_pct == p.config_pct && q.resource == p.resource) duplicate = true;
        if (!duplicate && points.size() < 512) points.push_back(p);
        time += rng.fixed(0, 60'000);
      }
    }
    auto table = OperatingPointTable::build(std::move(points));
    auto frontier = pareto_frontier(table);

    // independent O(n^2) oracle over raw fields
    std::set<std::string> expected;
    const auto& pts = table.points();
    for (const auto& candidate : pts) {
      bool dominated = false;
      for (const auto& other : pts) {
        if (&other == &candidate) continue;
        bool le = other.exec_time_ms.raw() <= candidate.exec_time_ms.raw() &&
                  other.energy_mj.raw() <= candidate.energy_mj.raw() &&
                  other.power_mw.raw() <= candidate.power_mw.raw() &&
                  other.accuracy_pct.raw() >= candidate.accuracy_pct.raw();
        bool lt = other.exec_time_ms.raw() < candidate.exec_time_ms.raw() ||
                  other.energy_mj.raw() < candidate.energy_mj.raw() ||
                  other.power_mw.raw() < candidate.power_mw.raw() ||
                  other.accuracy_pct.raw() > candidate.accuracy_pct.raw();
        if (le && lt) {
          dominated = true;
          break;
        }
      }
      if (!dominated)
        expected.insert(candidate.config_pct.str() + "|" + candidate.resource.cluster_id + "|" +
                        std::to_string(candidate.resource.core_count) + "|" +
                        std::to_string(candidate.resource.freq_mhz));
    }
    std::set<std::string> got;
    for (const auto& p : frontier.points())
      got.insert(p.config_pct.str() + "|" + p.resource.cluster_id + "|" +
                 std::to_string(p.resource.core_count) + "|" + std::to_string(p.resource.freq_mhz));
    if (got != expected)
      return "frontier mismatch on table " + std::to_string(iter) + " (" +
             std::to_string(got.size()) + " vs " + std::to_string(expected.size()) + " points)";
  }

  // allocate_all (exhaustive path) against brute_force_allocate
  test::Rng rng2(223);
  for (int iter = 0; iter < 200; ++iter) {
    auto instance = test::random_instance(rng2);
    Decision fast = allocate_all(instance.problem());
    Decision reference = brute_force_allocate(instance.problem());
    if (!(fast == reference)) return "allocation mismatch on instance " + std::to_string(iter);
  }

  // one dense instance at the exhaustive boundary: 3 workloads, 24 slots,
  // 4 levels, nearly every candidate budget-admissible
  {
    PlatformSpec platform;
    platform.name = "dense";
    platform.power_budget_mw = Fixed3::from_int(50000);
    platform.clusters = {
        {"p0", ClusterKind::cpu, 4, {400, 800, 1200, 1600}, "d0", 0},
        {"p1", ClusterKind::cpu, 4, {400, 800, 1200, 1600}, "d1", 0},
        {"p2", ClusterKind::gpu, 2, {600, 900, 1200}, "d2", 0},
    };
    platform.validate();

    test::Rng dense_rng(229);
    std::vector<OperatingPointTable> tables;
    std::vector<AllocRequest> requests;
    for (int w = 0; w < 3; ++w) {
      std::string id = "dense-" + std::to_string(w);
      std::vector<OperatingPoint> points;
      for (const auto& cluster : platform.clusters) {
        for (int cores = 1; cores <= cluster.units(); ++cores) {
          for (int f : cluster.freq_levels_mhz) {
            if (points.size() >= 24u * 4u) break;
            Fixed3 time = dense_rng.fixed(10'000, 80'000);
            for (int l = 1; l <= 4; ++l) {
              OperatingPoint p;
              p.workload_id = id;
              p.platform = "dense";
              p.config_pct = Percent::from_int(25 * l);
              p.resource = {cluster.id, cores, f};
              p.exec_time_ms = time;
              p.power_mw = dense_rng.fixed(100'000, 1'200'000);
              p.energy_mj = Fixed3::mul_div_thousand(p.power_mw, p.exec_time_ms);
              p.accuracy_pct = Percent::from_int(50 + 5 * l);
              points.push_back(p);
              time += dense_rng.fixed(1'000, 10'000);
            }
          }
        }
      }
      tables.push_back(OperatingPointTable::build(std::move(points)));
      Budgets budgets;
      budgets.t_max_ms = Fixed3::from_int(1000);  // everything admissible
      requests.push_back({id, budgets, nullptr});
    }
    for (int w = 0; w < 3; ++w) requests[w].table = &tables[w];

    AllocProblem dense;
    dense.platform = &platform;
    dense.power_ceiling_mw = Fixed3::from_int(2500);  // ceiling binds
    dense.dnns = requests;
    Decision fast = allocate_all(dense);
    Decision reference = brute_force_allocate(dense);
    if (!(fast == reference)) return "allocation mismatch on the dense boundary instance";
    if (fast.assignments.empty()) return "dense instance degenerate: nothing assigned";
  }

  double elapsed = seconds_since(start);
  if (elapsed >= 60.0) return "took " + std::to_string(elapsed) + " s (limit 60 s)";
  return "";
}

// ---------------------------------------------------------------------------
// 6. Byte determinism and event-permutation invariance.
std::string criterion_determinism() {
  for (const char* name : {"fig2.json", "single_dnn.json"}) {
    auto scenario = load_scenario(test::scenario_file(name));
    std::ostringstream a, b;
    write_trace_csv(run(scenario).trace, a);
    write_trace_csv(run(scenario).trace, b);
    if (a.str() != b.str()) return std::string(name) + ": two runs differ";
  }

  auto scenario = load_scenario(test::scenario_file("fig2.json"));
  std::ostringstream reference;
  write_trace_csv(run(scenario).trace, reference);
  test::Rng rng(307);
  for (int iter = 0; iter < 50; ++iter) {
    auto shuffled = scenario;
    for (std::size_t i = shuffled.scripted_events.size(); i > 1; --i)
      std::swap(shuffled.scripted_events[i - 1], shuffled.scripted_events[rng.range(0, i - 1)]);
    for (std::size_t i = 0; i < shuffled.scripted_events.size(); ++i)
      shuffled.scripted_events[i].declaration_index = static_cast<int>(i);
    std::ostringstream out;
    write_trace_csv(run(shuffled).trace, out);
    if (out.str() != reference.str())
      return "event permutation " + std::to_string(iter) + " changed the trace";
  }
  return "";
}

// ---------------------------------------------------------------------------
// 7. Monotone-scaling contract on every bundled table; scale round-trip.
std::string criterion_monotone_contract() {
  for (const char* name : {"table1.csv", "casestudy.csv", "fig2_dnn1.csv", "fig2_dnn2.csv"}) {
    OperatingPointTable table;
    try {
      table = load_table(test::data_file(name));
    } catch (const Error& e) {
      return std::string(name) + ": " + e.what();
    }
    for (const auto& id : table.workload_ids()) {
      for (const auto& slot : table.slots(id)) {
        const OperatingPoint* previous = nullptr;
        for (const auto& level : table.ladder(id)) {
          const OperatingPoint* p = table.find(id, level, slot);
          if (!p) continue;
          if (previous && (p->exec_time_ms < previous->exec_time_ms ||
                           p->accuracy_pct < previous->accuracy_pct))
            return std::string(name) + ": monotone contract broken for " + id;
          previous = p;
        }
      }
    }
  }

  auto table = load_table(test::data_file("casestudy.csv"));
  DnnWorkload w;
  w.id = "casestudy-dnn";
  w.budgets.t_max_ms = Fixed3::from_int(400);
  bind_table(w, table);
  Percent top_accuracy = w.accuracy_at(w.active_level);
  auto down = scale(w, Percent::from_int(25));
  auto back = scale(down, Percent::from_int(100));
  if (!(back == w)) return "scale round trip altered the workload";
  if (back.accuracy_at(back.active_level) != top_accuracy)
    return "accuracy not restored exactly after the round trip";
  return "";
}

// ---------------------------------------------------------------------------
// 8. Desk-scale exclusion note: the absolute accuracy values are inputs.
std::string criterion_accuracy_is_input() {
  // The published top-1 figures need trained models and hardware; here they
  // are characterization data. The bundled files carry them unchanged and
  // the property checks of criteria 1, 3 and 7 stand in for measurement.
  auto table = load_table(test::data_file("table1.csv"));
  for (const auto& p : table.points())
    if (p.accuracy_pct != Fixed3::parse("71.2").value())
      return "bundled accuracy values were altered";
  return "";
}

// ---------------------------------------------------------------------------
// 9. Plumbing throughput: an hour-long ten-workload scenario under 5 s.
std::string criterion_throughput() {
  auto platform = builtin_platform("generic-npu-soc");
  Scenario scenario;
  scenario.platform = platform;
  scenario.control_quantum_ms = 100;
  scenario.horizon_ms = 3'600'000;

  test::Rng rng(401);
  for (int w = 0; w < 10; ++w) {
    std::string id = "stress-" + std::to_string(w);
    std::vector<OperatingPoint> points;
    for (const auto& cluster : platform.clusters) {
      for (int cores = 1; cores <= std::min(2, cluster.units()); ++cores) {
        Fixed3 time = rng.fixed(20'000, 150'000);
        for (int l = 1; l <= 4; ++l) {
          OperatingPoint p;
          p.workload_id = id;
          p.platform = platform.name;
          p.config_pct = Percent::from_int(25 * l);
          p.resource = {cluster.id, cores, cluster.freq_levels_mhz.back()};
          p.exec_time_ms = time;
          p.power_mw = rng.fixed(100'000, 900'000);
          p.energy_mj = Fixed3::mul_div_thousand(p.power_mw, p.exec_time_ms);
          p.accuracy_pct = Percent::from_int(50 + 5 * l);
          points.push_back(p);
          time += rng.fixed(1'000, 30'000);
        }
      }
    }
    auto table = OperatingPointTable::build(std::move(points));

    DnnWorkload workload;
    workload.id = id;
    workload.arrival_ms = 100 * w;
    workload.budgets.t_max_ms = Fixed3::from_int(400);
    bind_table(workload, table);
    scenario.tables.emplace(id, std::move(table));
    scenario.dnns.push_back(std::move(workload));
    scenario.declaration_order.push_back(id);
  }

  auto start = Clock::now();
  auto result = run(scenario);
  auto trace_path = std::filesystem::temp_directory_path() / "edgertm-stress.trace.csv";
  {
    std::ofstream out(trace_path, std::ios::binary);
    write_trace_csv(result.trace, out);
  }
  double elapsed = seconds_since(start);
  std::filesystem::remove(trace_path);
  if (result.trace.size() < 300'000)
    return "trace unexpectedly small: " + std::to_string(result.trace.size()) + " rows";
  if (elapsed >= 5.0) return "took " + std::to_string(elapsed) + " s (limit 5 s)";
  return "";
}

} // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "table1 energy consistency (5% gate, 9 rows within 1%)", criterion_energy_consistency},
      {2, "platform ladders and coupling under 10000 randomized ops", criterion_platform_ladders},
      {3, "case-study budget decisions replay as unique optima", criterion_decision_replay},
      {4, "fig2 scenario replay: checkpoints, violations, exclusivity", criterion_fig2_replay},
      {5, "oracle equivalence: frontier x100 tables, allocation x200", criterion_oracle_equivalence},
      {6, "byte determinism and 50-fold event-permutation invariance", criterion_determinism},
      {7, "monotone-scaling contract and exact scale round-trip", criterion_monotone_contract},
      {8, "absolute accuracy excluded at desk scale; inputs unchanged", criterion_accuracy_is_input},
      {9, "1 h / 10 workloads / 100 ms quantum completes under 5 s", criterion_throughput},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    std::string detail;
    auto start = Clock::now();
    try {
      detail = criterion.check();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double elapsed = seconds_since(start);
    if (detail.empty()) {
      std::printf("[PASS] criterion %d: %s (%.2fs)\n", criterion.number, criterion.name.c_str(),
                  elapsed);
    } else {
      ++failures;
      std::printf("[FAIL] criterion %d: %s — %s\n", criterion.number, criterion.name.c_str(),
                  detail.c_str());
    }
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
