#include <benchmark/benchmark.h>

#include <set>
#include <sstream>

#include "edgertm/governor.hpp"
#include "edgertm/operating_point.hpp"
#include "edgertm/scenario.hpp"
#include "edgertm/sim.hpp"
#include "edgertm/table_io.hpp"
#include "support/test_support.hpp"

using namespace edgertm;

namespace {

OperatingPointTable synthetic_table(int n_points, std::uint64_t seed) {
  test::Rng rng(seed);
  std::vector<OperatingPoint> points;
  std::vector<Fixed3> level_accuracy;
  Fixed3 acc = rng.fixed(40'000, 60'000);
  for (int l = 0; l < 4; ++l) {
    level_accuracy.push_back(acc);
    acc += rng.fixed(0, 5'000);
  }
  while (static_cast<int>(points.size()) < n_points) {
    ResourceSlot slot{std::string("c") + std::to_string(static_cast<int>(rng.range(0, 7))),
                      static_cast<int>(rng.range(1, 4)), static_cast<int>(rng.range(2, 18)) * 100};
    Fixed3 time = rng.fixed(5'000, 500'000);
    for (int l = 1; l <= 4 && static_cast<int>(points.size()) < n_points; ++l) {
      OperatingPoint p;
      p.workload_id = "bench-dnn";
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
      if (!duplicate) points.push_back(p);
      time += rng.fixed(0, 60'000);
    }
  }
  return OperatingPointTable::build(std::move(points));
}

void BM_ParetoFrontier(benchmark::State& state) {
  auto table = synthetic_table(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) {
    auto frontier = pareto_frontier(table);
    benchmark::DoNotOptimize(frontier);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ParetoFrontier)->Range(64, 512)->Complexity();

void BM_SelectPoint(benchmark::State& state) {
  auto table = synthetic_table(static_cast<int>(state.range(0)), 11);
  std::set<ResourceSlot> available;
  for (const auto& p : table.points()) available.insert(p.resource);
  Budgets budgets;
  budgets.t_max_ms = Fixed3::from_int(250);
  budgets.e_max_mj = Fixed3::from_int(400);
  for (auto _ : state) {
    auto chosen = select_point(table, budgets, available);
    benchmark::DoNotOptimize(chosen);
  }
}
BENCHMARK(BM_SelectPoint)->Range(64, 512);

void BM_AllocateExhaustive(benchmark::State& state) {
  test::Rng rng(13);
  auto instance = test::random_instance(rng);
  for (auto _ : state) {
    Decision decision = allocate_all(instance.problem());
    benchmark::DoNotOptimize(decision);
  }
}
BENCHMARK(BM_AllocateExhaustive);

void BM_ScenarioTick(benchmark::State& state) {
  // cost of one simulated second (10 governor ticks) in a 10-workload script
  auto platform = builtin_platform("generic-npu-soc");
  Scenario scenario;
  scenario.platform = platform;
  scenario.control_quantum_ms = 100;
  scenario.horizon_ms = 1000;
  test::Rng rng(17);
  for (int w = 0; w < 10; ++w) {
    std::string id = "bench-" + std::to_string(w);
    std::vector<OperatingPoint> points;
    for (const auto& cluster : platform.clusters) {
      Fixed3 time = rng.fixed(20'000, 150'000);
      for (int l = 1; l <= 4; ++l) {
        OperatingPoint p;
        p.workload_id = id;
        p.platform = platform.name;
        p.config_pct = Percent::from_int(25 * l);
        p.resource = {cluster.id, 1, cluster.freq_levels_mhz.back()};
        p.exec_time_ms = time;
        p.power_mw = rng.fixed(100'000, 900'000);
        p.energy_mj = Fixed3::mul_div_thousand(p.power_mw, p.exec_time_ms);
        p.accuracy_pct = Percent::from_int(50 + 5 * l);
        points.push_back(p);
        time += rng.fixed(1'000, 30'000);
      }
    }
    auto table = OperatingPointTable::build(std::move(points));
    DnnWorkload workload;
    workload.id = id;
    workload.budgets.t_max_ms = Fixed3::from_int(400);
    bind_table(workload, table);
    scenario.tables.emplace(id, std::move(table));
    scenario.dnns.push_back(std::move(workload));
    scenario.declaration_order.push_back(id);
  }
  for (auto _ : state) {
    auto result = run(scenario);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_ScenarioTick);

void BM_TraceWrite(benchmark::State& state) {
  auto scenario = load_scenario(test::scenario_file("fig2.json"));
  auto result = run(scenario);
  for (auto _ : state) {
    std::ostringstream out;
    write_trace_csv(result.trace, out);
    benchmark::DoNotOptimize(out);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(result.trace.size()) * 100);
}
BENCHMARK(BM_TraceWrite);

} // namespace

BENCHMARK_MAIN();
