#include <doctest.h>

#include "edgertm/errors.hpp"
#include "edgertm/platform.hpp"
#include "support/test_support.hpp"

using namespace edgertm;

TEST_CASE("odroid-xu3 ladders have the measured level counts") {
  auto spec = builtin_platform("odroid-xu3");
  const ClusterSpec* a15 = spec.find_cluster("a15");
  const ClusterSpec* a7 = spec.find_cluster("a7");
  REQUIRE(a15);
  REQUIRE(a7);
  CHECK(a15->freq_levels_mhz.size() == 17);
  CHECK(a15->freq_levels_mhz.front() == 200);
  CHECK(a15->freq_levels_mhz.back() == 1800);
  CHECK(a7->freq_levels_mhz.size() == 12);
  CHECK(a7->freq_levels_mhz.back() == 1300);
  CHECK(a15->domain_id != a7->domain_id);
}

TEST_CASE("jetson-nano carries only the measured frequencies") {
  auto spec = builtin_platform("jetson-nano");
  CHECK(spec.find_cluster("a57")->freq_levels_mhz == std::vector<int>{921, 1430});
  CHECK(spec.find_cluster("gpu")->freq_levels_mhz == std::vector<int>{614, 921});
}

TEST_CASE("generic-npu-soc has a two-unit NPU and a little-cluster rider") {
  auto spec = builtin_platform("generic-npu-soc");
  const ClusterSpec* npu = spec.find_cluster("npu");
  REQUIRE(npu);
  CHECK(npu->kind == ClusterKind::npu);
  CHECK(npu->npu_capacity == 2);
  CHECK(npu->units() == 2);
  CHECK(spec.npu_rider_cluster() == std::string("little"));
}

TEST_CASE("unknown platform name is rejected") {
  CHECK_THROWS_AS(builtin_platform("odroid-xu4"), UsageError);
}

TEST_CASE("set_frequency is domain-isolated and ladder-checked") {
  auto spec = builtin_platform("odroid-xu3");
  auto state = PlatformState::initial(spec);
  CHECK(state.domain_frequency("a15") == 200);
  CHECK(state.domain_frequency("a7") == 200);

  auto next = state.with_frequency(spec, "a15", 1000);
  CHECK(next.domain_frequency("a15") == 1000);
  CHECK(next.domain_frequency("a7") == 200);
  CHECK(next.cluster_frequency(spec, "a15") == 1000);

  CHECK(next.with_frequency(spec, "a15", 1000) == next);  // idempotent

  CHECK_THROWS_AS(state.with_frequency(spec, "a15", 1850), UsageError);
  CHECK_THROWS_AS(state.with_frequency(spec, "mid", 1000), UsageError);
}

TEST_CASE("allocation is exclusive and frequency-consistent") {
  auto spec = builtin_platform("odroid-xu3");
  auto state = PlatformState::initial(spec).with_frequency(spec, "a15", 1000);

  auto held = state.with_allocation(spec, "w1", {"a15", 4, 1000});
  CHECK(held.used_units("a15") == 4);
  CHECK(held.free_units(spec, "a15") == 0);
  CHECK_THROWS_AS(held.with_allocation(spec, "w2", {"a15", 1, 1000}), ContentionError);

  // frequency mismatch is a contract violation, not contention
  CHECK_THROWS_AS(state.with_allocation(spec, "w1", {"a15", 1, 1400}), UsageError);
  CHECK_THROWS_AS(state.with_allocation(spec, "w1", {"a15", 5, 1000}), UsageError);
  CHECK_THROWS_AS(state.with_allocation(spec, "w1", {"mid", 1, 1000}), UsageError);
}

TEST_CASE("two tenants share the NPU and bring their riders") {
  auto spec = builtin_platform("generic-npu-soc");
  auto state = PlatformState::initial(spec).with_frequency(spec, "npu", 1000);

  auto one = state.with_allocation(spec, "dnn-1", {"npu", 1, 1000});
  auto two = one.with_allocation(spec, "dnn-2", {"npu", 1, 1000});
  CHECK(two.used_units("npu") == 2);
  CHECK(two.used_units("little") == 2);  // one pre-processing core each
  CHECK(two.holdings("little").at("dnn-1") == 1);
  CHECK(two.holdings("little").at("dnn-2") == 1);
  CHECK_THROWS_AS(two.with_allocation(spec, "dnn-3", {"npu", 1, 1000}), ContentionError);

  auto one_left = two.with_release(spec, "dnn-1");
  CHECK(one_left.used_units("npu") == 1);
  CHECK(one_left.used_units("little") == 1);
  CHECK(one_left.holdings("npu").count("dnn-2") == 1);
  CHECK(one_left.holdings("npu").count("dnn-1") == 0);
}

TEST_CASE("allocate then release restores the exact state") {
  auto spec = builtin_platform("generic-npu-soc");
  auto state = PlatformState::initial(spec).with_frequency(spec, "big", 1800);
  auto held = state.with_allocation(spec, "w", {"big", 4, 1800});
  CHECK(held.with_release(spec, "w") == state);
  CHECK_THROWS_AS(state.with_release(spec, "ghost"), UsageError);
}

TEST_CASE("total_power sums assigned points") {
  auto spec = builtin_platform("jetson-nano");
  auto state = PlatformState::initial(spec);
  CHECK(total_power(state, {}).is_zero());

  state = state.with_frequency(spec, "a57", 921).with_allocation(spec, "w1", {"a57", 4, 921});
  OperatingPoint p1;
  p1.workload_id = "w1";
  p1.power_mw = Fixed3::from_int(878);  // A57 @921 MHz row
  CHECK(total_power(state, {{"w1", p1}}) == Fixed3::from_int(878));

  state = state.with_frequency(spec, "gpu", 614).with_allocation(spec, "w2", {"gpu", 1, 614});
  OperatingPoint p2;
  p2.workload_id = "w2";
  p2.power_mw = Fixed3::from_int(1340);
  CHECK(total_power(state, {{"w1", p1}, {"w2", p2}}) == Fixed3::from_int(2218));
  CHECK(total_power(state, {{"w2", p2}, {"w1", p1}}) == Fixed3::from_int(2218));

  CHECK_THROWS_AS(total_power(state, {{"ghost", p1}}), UsageError);
}

TEST_CASE("thermal_ok is inclusive at the ceiling") {
  auto spec = builtin_platform("generic-npu-soc");
  CHECK(thermal_ok(spec, spec.power_budget_mw));
  CHECK(!thermal_ok(spec, spec.power_budget_mw + Fixed3::from_raw(1)));
  CHECK(thermal_ok(spec, PowerMw{}));

  // the scripted 5500 mW ceiling of the staged scenario: the 4-core big-CPU
  // point (with the NPU tenant and the GPU co-runner) exceeds it, the
  // compressed 1-core point fits
  auto scripted = spec;
  scripted.power_budget_mw = Fixed3::from_int(5500);
  PowerMw with_four_cores = Fixed3::from_int(2200 + 1800 + 2000);
  PowerMw with_one_core = Fixed3::from_int(2200 + 1800 + 700);
  CHECK(!thermal_ok(scripted, with_four_cores));
  CHECK(thermal_ok(scripted, with_one_core));
}

TEST_CASE("randomized operation sequences keep the platform invariants") {
  auto spec = builtin_platform("generic-npu-soc");
  test::Rng rng(23);
  auto state = PlatformState::initial(spec);
  std::vector<std::string> owners = {"w0", "w1", "w2", "w3", "w4"};

  for (int step = 0; step < 2000; ++step) {
    int action = static_cast<int>(rng.range(0, 2));
    try {
      if (action == 0) {
        auto domains = spec.domain_ids();
        const auto& domain = domains[rng.range(0, domains.size() - 1)];
        auto levels = spec.domain_levels(domain);
        state = state.with_frequency(spec, domain, levels[rng.range(0, levels.size() - 1)]);
      } else if (action == 1) {
        const auto& cluster = spec.clusters[rng.range(0, spec.clusters.size() - 1)];
        ResourceSlot slot{cluster.id, static_cast<int>(rng.range(1, cluster.units())),
                          state.domain_frequency(cluster.domain_id)};
        state = state.with_allocation(spec, owners[rng.range(0, owners.size() - 1)], slot);
      } else {
        state = state.with_release(spec, owners[rng.range(0, owners.size() - 1)]);
      }
    } catch (const ContentionError&) {
    } catch (const UsageError&) {
    }

    // coupling: all clusters of a domain report one frequency
    for (const auto& domain : spec.domain_ids()) {
      int freq = state.domain_frequency(domain);
      for (const auto& cluster_id : spec.clusters_in_domain(domain))
        CHECK(state.cluster_frequency(spec, cluster_id) == freq);
    }
    // exclusivity: per-owner holdings sum to the occupancy, within capacity
    for (const auto& cluster : spec.clusters) {
      int sum = 0;
      for (const auto& [owner, units] : state.holdings(cluster.id)) {
        CHECK(units >= 1);
        sum += units;
      }
      CHECK(sum == state.used_units(cluster.id));
      CHECK(sum <= cluster.units());
    }
  }
}

TEST_CASE("platform invariants are validated") {
  PlatformSpec bad;
  bad.name = "bad";
  bad.power_budget_mw = Fixed3::from_int(1000);
  bad.clusters = {{"c", ClusterKind::cpu, 4, {1000, 800}, "d", 0}};
  CHECK_THROWS_AS(bad.validate(), InvariantError);  // descending ladder

  bad.clusters = {{"c", ClusterKind::npu, 1, {800}, "d", 0}};
  CHECK_THROWS_AS(bad.validate(), InvariantError);  // npu without capacity

  bad.clusters = {{"c", ClusterKind::cpu, 4, {800}, "d", 0}, {"c", ClusterKind::cpu, 4, {800}, "d", 0}};
  CHECK_THROWS_AS(bad.validate(), InvariantError);  // duplicate id

  // two clusters in one domain without a common level
  bad.clusters = {{"c1", ClusterKind::cpu, 4, {800}, "d", 0}, {"c2", ClusterKind::cpu, 4, {900}, "d", 0}};
  CHECK_THROWS_AS(bad.validate(), InvariantError);
}
