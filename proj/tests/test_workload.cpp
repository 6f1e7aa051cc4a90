#include <doctest.h>

#include "edgertm/errors.hpp"
#include "edgertm/table_io.hpp"
#include "edgertm/workload.hpp"
#include "support/test_support.hpp"

using namespace edgertm;

namespace {

DnnWorkload sample_workload() {
  DnnWorkload w;
  w.id = "dnn";
  w.accuracy_by_level = {
      {Percent::from_int(25), Fixed3::parse("58").value()},
      {Percent::from_int(50), Fixed3::parse("65.5").value()},
      {Percent::from_int(75), Fixed3::parse("69.4").value()},
      {Percent::from_int(100), Fixed3::parse("71.2").value()},
  };
  w.budgets.t_max_ms = Fixed3::from_int(400);
  w.validate();
  return w;
}

} // namespace

TEST_CASE("scale relabels the active level and restores accuracy exactly") {
  auto w = sample_workload();
  CHECK(w.active_level == Percent::from_int(100));

  auto same = scale(w, Percent::from_int(100));
  CHECK(same == w);

  auto down = scale(w, Percent::from_int(25));
  CHECK(down.active_level == Percent::from_int(25));
  CHECK(down.accuracy_at(down.active_level) == Fixed3::parse("58").value());

  auto back = scale(down, Percent::from_int(100));
  CHECK(back == w);
  CHECK(back.accuracy_at(back.active_level) == Fixed3::parse("71.2").value());
  CHECK(back.accuracy_by_level == w.accuracy_by_level);

  CHECK_THROWS_AS(scale(w, Percent::from_int(60)), UsageError);
}

TEST_CASE("switch_cost is the rank distance times the per-step cost") {
  auto ladder = default_config_ladder();
  ReconfigCost zero;
  CHECK(switch_cost(ladder, Percent::from_int(50), Percent::from_int(50), zero) ==
        std::pair{TimeMs{}, EnergyMj{}});

  ReconfigCost cost{Fixed3::from_int(1), Fixed3::parse("0.5").value()};
  auto [t, e] = switch_cost(ladder, Percent::from_int(25), Percent::from_int(100), cost);
  CHECK(t == Fixed3::from_int(3));
  CHECK(e == Fixed3::parse("1.5").value());

  // default-constructed cost is free regardless of distance
  auto [t0, e0] = switch_cost(ladder, Percent::from_int(25), Percent::from_int(100), zero);
  CHECK(t0.is_zero());
  CHECK(e0.is_zero());

  CHECK_THROWS_AS(switch_cost(ladder, Percent::from_int(30), Percent::from_int(100), zero), UsageError);
}

TEST_CASE("switch_cost is a metric on ladder ranks") {
  auto ladder = default_config_ladder();
  ReconfigCost cost{Fixed3::parse("2.5").value(), Fixed3::from_int(1)};
  for (const auto& a : ladder) {
    for (const auto& b : ladder) {
      auto [tab, eab] = switch_cost(ladder, a, b, cost);
      auto [tba, eba] = switch_cost(ladder, b, a, cost);
      CHECK(tab == tba);
      CHECK(eab == eba);
      CHECK((a == b) == tab.is_zero());
      for (const auto& c : ladder) {
        auto [tac, _] = switch_cost(ladder, a, c, cost);
        auto [tcb, _2] = switch_cost(ladder, c, b, cost);
        CHECK(tab <= tac + tcb);
      }
    }
  }
}

TEST_CASE("active_demand distinguishes fixed and governor-chosen workloads") {
  auto dnn = sample_workload();
  dnn.arrival_ms = 100;
  dnn.exit_ms = 1000;

  auto demand = active_demand(dnn, 500);
  CHECK(demand.governor_chosen);
  CHECK(!demand.slot);

  OpaqueWorkload vr;
  vr.id = "vr";
  vr.fixed_demand = {"gpu", 1, 800};
  vr.fixed_power_mw = Fixed3::from_int(1800);
  vr.arrival_ms = 0;
  auto fixed = active_demand(vr, 10);
  CHECK(!fixed.governor_chosen);
  CHECK(fixed.slot == ResourceSlot{"gpu", 1, 800});

  CHECK_THROWS_AS(active_demand(dnn, 50), LifecycleError);    // before arrival
  CHECK_THROWS_AS(active_demand(dnn, 1000), LifecycleError);  // at exit, window is half-open
}

TEST_CASE("accuracy must be non-decreasing in level") {
  DnnWorkload w = sample_workload();
  w.accuracy_by_level[Percent::from_int(75)] = Fixed3::from_int(10);
  CHECK_THROWS_AS(w.validate(), InvariantError);
}

TEST_CASE("bind_table cross-checks ladder and fills accuracy") {
  auto table = load_table(test::data_file("fig2_dnn1.csv"));
  DnnWorkload w;
  w.id = "dnn-1";
  w.budgets.t_max_ms = Fixed3::from_int(500);
  bind_table(w, table);
  CHECK(w.accuracy_by_level.size() == 4);
  CHECK(w.accuracy_at(Percent::from_int(75)) == Fixed3::parse("69.4").value());

  DnnWorkload wrong_id = w;
  wrong_id.id = "dnn-9";
  CHECK_THROWS_AS(bind_table(wrong_id, table), InvariantError);

  DnnWorkload wrong_ladder = w;
  wrong_ladder.id = "dnn-1";
  wrong_ladder.config_ladder = {Percent::from_int(50), Percent::from_int(100)};
  CHECK_THROWS_AS(bind_table(wrong_ladder, table), InvariantError);
}

TEST_CASE("bundled tables satisfy the monotone scaling contract at load") {
  for (const char* name : {"table1.csv", "casestudy.csv", "fig2_dnn1.csv", "fig2_dnn2.csv"}) {
    auto table = load_table(test::data_file(name));
    CHECK(!table.empty());
    // grouping by resource, time and accuracy are non-decreasing in level
    for (const auto& id : table.workload_ids()) {
      for (const auto& slot : table.slots(id)) {
        const OperatingPoint* previous = nullptr;
        for (const auto& level : table.ladder(id)) {
          const OperatingPoint* p = table.find(id, level, slot);
          if (!p) continue;
          if (previous) {
            CHECK(previous->exec_time_ms <= p->exec_time_ms);
            CHECK(previous->accuracy_pct <= p->accuracy_pct);
          }
          previous = p;
        }
      }
    }
  }
}
