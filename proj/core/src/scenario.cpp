#include "edgertm/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "edgertm/errors.hpp"
#include "edgertm/table_io.hpp"

namespace edgertm {

namespace {

using nlohmann::json;

Fixed3 fixed_at(const json& node, const std::string& path) {
  if (node.is_string()) {
    auto parsed = Fixed3::parse(node.get<std::string>());
    if (!parsed) throw SchemaError(path, "bad decimal '" + node.get<std::string>() + "'");
    return *parsed;
  }
  if (!node.is_number()) throw SchemaError(path, "expected a number");
  return Fixed3::from_double(node.get<double>());
}

std::int64_t int_at(const json& node, const std::string& path) {
  if (!node.is_number_integer()) throw SchemaError(path, "expected an integer");
  return node.get<std::int64_t>();
}

std::string string_at(const json& node, const std::string& path) {
  if (!node.is_string()) throw SchemaError(path, "expected a string");
  return node.get<std::string>();
}

const json& member(const json& node, const char* name, const std::string& path) {
  if (!node.is_object()) throw SchemaError(path, "expected an object");
  auto it = node.find(name);
  if (it == node.end()) throw SchemaError(path + "." + name, "missing field");
  return *it;
}

bool valid_id(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

Budgets budgets_at(const json& node, const std::string& path) {
  if (!node.is_object()) throw SchemaError(path, "expected an object");
  Budgets budgets;
  if (node.contains("t_max_ms")) budgets.t_max_ms = fixed_at(node.at("t_max_ms"), path + ".t_max_ms");
  if (node.contains("e_max_mj")) budgets.e_max_mj = fixed_at(node.at("e_max_mj"), path + ".e_max_mj");
  if (node.contains("p_max_mw")) budgets.p_max_mw = fixed_at(node.at("p_max_mw"), path + ".p_max_mw");
  if (node.contains("acc_min")) budgets.acc_min_pct = fixed_at(node.at("acc_min"), path + ".acc_min");
  for (const auto& [key, value] : node.items())
    if (key != "t_max_ms" && key != "e_max_mj" && key != "p_max_mw" && key != "acc_min")
      throw SchemaError(path + "." + key, "unknown budget field");
  if ((budgets.t_max_ms && budgets.t_max_ms->is_negative()) ||
      (budgets.e_max_mj && budgets.e_max_mj->is_negative()) ||
      (budgets.p_max_mw && budgets.p_max_mw->is_negative()) || budgets.acc_min_pct.is_negative())
    throw SchemaError(path, "budget bounds must be >= 0");
  return budgets;
}

ResourceSlot slot_at(const json& node, const std::string& path) {
  ResourceSlot slot;
  slot.cluster_id = string_at(member(node, "cluster", path), path + ".cluster");
  slot.core_count = static_cast<int>(int_at(member(node, "cores", path), path + ".cores"));
  slot.freq_mhz = static_cast<int>(int_at(member(node, "freq_mhz", path), path + ".freq_mhz"));
  return slot;
}

PlatformSpec platform_at(const json& node, const std::string& path) {
  if (node.is_string()) return builtin_platform(node.get<std::string>());
  if (!node.is_object()) throw SchemaError(path, "expected a platform name or an inline spec");
  PlatformSpec spec;
  spec.name = string_at(member(node, "name", path), path + ".name");
  spec.power_budget_mw = fixed_at(member(node, "power_budget_mw", path), path + ".power_budget_mw");
  const json& clusters = member(node, "clusters", path);
  if (!clusters.is_array()) throw SchemaError(path + ".clusters", "expected an array");
  int i = 0;
  for (const auto& cnode : clusters) {
    std::string cpath = path + ".clusters[" + std::to_string(i++) + "]";
    ClusterSpec c;
    c.id = string_at(member(cnode, "id", cpath), cpath + ".id");
    c.kind = cluster_kind_from_string(string_at(member(cnode, "kind", cpath), cpath + ".kind"));
    c.core_count = static_cast<int>(int_at(member(cnode, "core_count", cpath), cpath + ".core_count"));
    const json& levels = member(cnode, "freq_levels_mhz", cpath);
    if (!levels.is_array()) throw SchemaError(cpath + ".freq_levels_mhz", "expected an array");
    for (const auto& level : levels)
      c.freq_levels_mhz.push_back(static_cast<int>(int_at(level, cpath + ".freq_levels_mhz[]")));
    c.domain_id = string_at(member(cnode, "domain_id", cpath), cpath + ".domain_id");
    if (cnode.contains("npu_capacity"))
      c.npu_capacity = static_cast<int>(int_at(cnode.at("npu_capacity"), cpath + ".npu_capacity"));
    spec.clusters.push_back(std::move(c));
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
  return spec;
}

} // namespace

std::string ScenarioEvent::tag() const {
  switch (kind) {
    case Kind::arrival: return "arrival:" + workload_id;
    case Kind::exit_: return "exit:" + workload_id;
    case Kind::budget_change: return "budget-change:" + workload_id;
    case Kind::power_budget_change: return "power-budget-change";
    case Kind::accuracy_requirement_change: return "accuracy-requirement-change:" + workload_id;
  }
  return "event";
}

int kind_rank(ScenarioEvent::Kind kind) {
  return static_cast<int>(kind);
}

std::string_view to_string(ScenarioEvent::Kind kind) {
  switch (kind) {
    case ScenarioEvent::Kind::arrival: return "arrival";
    case ScenarioEvent::Kind::exit_: return "exit";
    case ScenarioEvent::Kind::budget_change: return "budget_change";
    case ScenarioEvent::Kind::power_budget_change: return "power_budget_change";
    case ScenarioEvent::Kind::accuracy_requirement_change: return "accuracy_requirement_change";
  }
  return "?";
}

bool event_order_less(const ScenarioEvent& a, const ScenarioEvent& b) {
  auto payload = [](const ScenarioEvent& e) {
    std::int64_t value = 0;
    if (e.power_budget_mw) value = e.power_budget_mw->raw();
    if (e.acc_min_pct) value = e.acc_min_pct->raw();
    if (e.budgets) {
      value = e.budgets->acc_min_pct.raw();
      if (e.budgets->t_max_ms) value ^= e.budgets->t_max_ms->raw() << 1;
      if (e.budgets->e_max_mj) value ^= e.budgets->e_max_mj->raw() << 2;
      if (e.budgets->p_max_mw) value ^= e.budgets->p_max_mw->raw() << 3;
    }
    return value;
  };
  auto key = [&](const ScenarioEvent& e) {
    return std::tuple(e.at_ms, kind_rank(e.kind), e.workload_id, payload(e), e.declaration_index);
  };
  return key(a) < key(b);
}

void Scenario::validate() const {
  platform.validate();
  if (control_quantum_ms <= 0) throw SchemaError("control_quantum_ms", "must be > 0");
  if (horizon_ms <= 0) throw SchemaError("horizon_ms", "must be > 0");

  std::set<std::string> ids;
  for (const auto& id : declaration_order)
    if (!ids.insert(id).second) throw SchemaError("workloads", "duplicate workload id '" + id + "'");

  for (const auto& w : dnns) {
    if (!w.budgets.any_bound())
      throw SchemaError("workloads." + w.id + ".budgets", "at least one bound must be finite");
    auto table_it = tables.find(w.id);
    if (table_it == tables.end())
      throw SchemaError("workloads." + w.id + ".table", "no table bound");
    // Each table slot must exist on the platform.
    for (const auto& p : table_it->second.points()) {
      const ClusterSpec* cluster = platform.find_cluster(p.resource.cluster_id);
      if (!cluster)
        throw SchemaError("workloads." + w.id + ".table",
                          "unknown cluster '" + p.resource.cluster_id + "' in table");
      if (p.resource.core_count > cluster->units())
        throw SchemaError("workloads." + w.id + ".table",
                          "table requests " + std::to_string(p.resource.core_count) + " units of '" +
                              p.resource.cluster_id + "'");
      if (!cluster->has_level(p.resource.freq_mhz))
        throw SchemaError("workloads." + w.id + ".table",
                          "frequency " + std::to_string(p.resource.freq_mhz) +
                              " MHz is not on the ladder of '" + p.resource.cluster_id + "'");
    }
  }
  for (const auto& w : opaques) {
    const ClusterSpec* cluster = platform.find_cluster(w.fixed_demand.cluster_id);
    if (!cluster)
      throw SchemaError("workloads." + w.id + ".demand",
                        "unknown cluster '" + w.fixed_demand.cluster_id + "'");
    if (!cluster->has_level(w.fixed_demand.freq_mhz))
      throw SchemaError("workloads." + w.id + ".demand",
                        "frequency " + std::to_string(w.fixed_demand.freq_mhz) +
                            " MHz is not on the ladder of '" + w.fixed_demand.cluster_id + "'");
    if (!w.fixed_power_mw.is_positive())
      throw SchemaError("workloads." + w.id + ".power_mw", "must be > 0");
  }

  int i = 0;
  for (const auto& e : scripted_events) {
    std::string path = "events[" + std::to_string(i++) + "]";
    if (e.at_ms < 0) throw SchemaError(path + ".at_ms", "must be >= 0");
    if (e.at_ms > horizon_ms) throw SchemaError(path + ".at_ms", "beyond the horizon");
    if (e.kind == ScenarioEvent::Kind::arrival || e.kind == ScenarioEvent::Kind::exit_)
      throw SchemaError(path + ".kind",
                        "arrival/exit are declared on workloads (arrival_ms/exit_ms), not scripted");
    if (e.kind != ScenarioEvent::Kind::power_budget_change) {
      if (!ids.count(e.workload_id))
        throw SchemaError(path + ".workload_id", "unknown workload '" + e.workload_id + "'");
      bool is_dnn = std::any_of(dnns.begin(), dnns.end(),
                                [&](const DnnWorkload& w) { return w.id == e.workload_id; });
      if (!is_dnn)
        throw SchemaError(path + ".workload_id", "'" + e.workload_id + "' is not a scalable workload");
    }
    if (e.kind == ScenarioEvent::Kind::power_budget_change &&
        (!e.power_budget_mw || !e.power_budget_mw->is_positive()))
      throw SchemaError(path + ".power_budget_mw", "must be > 0");
    if (e.kind == ScenarioEvent::Kind::accuracy_requirement_change &&
        (!e.acc_min_pct || e.acc_min_pct->is_negative() || *e.acc_min_pct > Percent::from_int(100)))
      throw SchemaError(path + ".acc_min", "must be in [0,100]");
    if (e.kind == ScenarioEvent::Kind::budget_change && !e.budgets)
      throw SchemaError(path + ".budgets", "missing");
  }
}

Scenario scenario_from_json_text(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("(root)", std::string("json parse error: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("(root)", "expected an object");

  Scenario scenario;
  scenario.platform = platform_at(member(doc, "platform", "(root)"), "platform");
  if (doc.contains("control_quantum_ms"))
    scenario.control_quantum_ms = int_at(doc.at("control_quantum_ms"), "control_quantum_ms");
  if (doc.contains("seed")) scenario.seed = static_cast<std::uint64_t>(int_at(doc.at("seed"), "seed"));

  const json& workloads = member(doc, "workloads", "(root)");
  if (!workloads.is_array()) throw SchemaError("workloads", "expected an array");
  std::int64_t max_ms = 0;
  int wi = 0;
  for (const auto& wnode : workloads) {
    std::string wpath = "workloads[" + std::to_string(wi++) + "]";
    std::string id = string_at(member(wnode, "id", wpath), wpath + ".id");
    if (!valid_id(id)) throw SchemaError(wpath + ".id", "ids are [A-Za-z0-9._-]+");
    std::string type = string_at(member(wnode, "type", wpath), wpath + ".type");
    scenario.declaration_order.push_back(id);

    std::int64_t arrival = 0;
    if (wnode.contains("arrival_ms")) arrival = int_at(wnode.at("arrival_ms"), wpath + ".arrival_ms");
    std::optional<std::int64_t> exit_ms;
    if (wnode.contains("exit_ms")) exit_ms = int_at(wnode.at("exit_ms"), wpath + ".exit_ms");
    max_ms = std::max(max_ms, exit_ms.value_or(arrival));

    if (type == "dnn") {
      DnnWorkload w;
      w.id = id;
      w.arrival_ms = arrival;
      w.exit_ms = exit_ms;
      if (wnode.contains("ladder")) {
        w.config_ladder.clear();
        for (const auto& level : wnode.at("ladder"))
          w.config_ladder.push_back(fixed_at(level, wpath + ".ladder[]"));
      }
      w.budgets = budgets_at(member(wnode, "budgets", wpath), wpath + ".budgets");
      if (wnode.contains("reconfig")) {
        const json& r = wnode.at("reconfig");
        if (r.contains("switch_time_ms"))
          w.reconfig.switch_time_ms = fixed_at(r.at("switch_time_ms"), wpath + ".reconfig.switch_time_ms");
        if (r.contains("switch_energy_mj"))
          w.reconfig.switch_energy_mj =
              fixed_at(r.at("switch_energy_mj"), wpath + ".reconfig.switch_energy_mj");
      }
      std::string table_rel = string_at(member(wnode, "table", wpath), wpath + ".table");
      std::filesystem::path table_path = base_dir / table_rel;
      OperatingPointTable table;
      try {
        table = load_table(table_path);
      } catch (const Error& e) {
        throw SchemaError(wpath + ".table", std::string(e.what()) + " (" + table_path.string() + ")");
      }
      try {
        bind_table(w, table);
      } catch (const Error& e) {
        throw SchemaError(wpath + ".table", e.what());
      }
      scenario.tables.emplace(id, std::move(table));
      scenario.dnns.push_back(std::move(w));
    } else if (type == "opaque") {
      OpaqueWorkload w;
      w.id = id;
      w.arrival_ms = arrival;
      w.exit_ms = exit_ms;
      w.fixed_demand = slot_at(member(wnode, "demand", wpath), wpath + ".demand");
      w.fixed_power_mw = fixed_at(member(wnode, "power_mw", wpath), wpath + ".power_mw");
      scenario.opaques.push_back(std::move(w));
    } else {
      throw SchemaError(wpath + ".type", "expected 'dnn' or 'opaque'");
    }
  }

  if (doc.contains("events")) {
    const json& events = member(doc, "events", "(root)");
    if (!events.is_array()) throw SchemaError("events", "expected an array");
    int ei = 0;
    for (const auto& enode : events) {
      std::string epath = "events[" + std::to_string(ei) + "]";
      ScenarioEvent e;
      e.declaration_index = ei++;
      e.at_ms = int_at(member(enode, "at_ms", epath), epath + ".at_ms");
      std::string kind = string_at(member(enode, "kind", epath), epath + ".kind");
      if (kind == "budget_change") {
        e.kind = ScenarioEvent::Kind::budget_change;
        e.workload_id = string_at(member(enode, "workload_id", epath), epath + ".workload_id");
        e.budgets = budgets_at(member(enode, "budgets", epath), epath + ".budgets");
      } else if (kind == "power_budget_change") {
        e.kind = ScenarioEvent::Kind::power_budget_change;
        e.power_budget_mw = fixed_at(member(enode, "power_budget_mw", epath), epath + ".power_budget_mw");
      } else if (kind == "accuracy_requirement_change") {
        e.kind = ScenarioEvent::Kind::accuracy_requirement_change;
        e.workload_id = string_at(member(enode, "workload_id", epath), epath + ".workload_id");
        e.acc_min_pct = fixed_at(member(enode, "acc_min", epath), epath + ".acc_min");
      } else if (kind == "arrival" || kind == "exit") {
        throw SchemaError(epath + ".kind",
                          "arrival/exit are declared on workloads (arrival_ms/exit_ms), not scripted");
      } else {
        throw SchemaError(epath + ".kind", "unknown event kind '" + kind + "'");
      }
      max_ms = std::max(max_ms, e.at_ms);
      scenario.scripted_events.push_back(std::move(e));
    }
  }

  if (doc.contains("horizon_ms"))
    scenario.horizon_ms = int_at(doc.at("horizon_ms"), "horizon_ms");
  else
    scenario.horizon_ms = max_ms + scenario.control_quantum_ms;

  scenario.validate();
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("(file)", "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json_text(buffer.str(), path.parent_path());
}

} // namespace edgertm
