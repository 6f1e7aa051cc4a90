#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgertm/fixed3.hpp"

namespace edgertm {

/// One timestamped simulator output row. Assignment columns are empty for a
/// workload that holds nothing at that instant (opaque rows carry their
/// fixed demand and power; time/energy/accuracy stay empty for them).
struct TraceRecord {
  std::int64_t at_ms = 0;
  std::string workload_id;
  std::optional<Percent> config_level;
  std::string cluster;              // empty = no assignment in force
  std::optional<int> cores;
  std::optional<int> freq_mhz;
  std::optional<TimeMs> pred_time_ms;
  std::optional<EnergyMj> pred_energy_mj;
  std::optional<PowerMw> pred_power_mw;
  std::optional<Percent> accuracy;
  PowerMw platform_power_mw;
  std::string event_tag;
  std::string rationale;            // ';'-joined audit tags

  bool assigned() const { return !cluster.empty(); }

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using Trace = std::vector<TraceRecord>;

extern const char* const kTraceCsvHeader;

/// LF line endings, header row mandatory, minimal-digit decimal fields.
void write_trace_csv(const Trace& trace, std::ostream& out);
Trace read_trace_csv(std::istream& in);  // throws ParseError

/// The assignment map in force at `at_ms`: for each workload, its last
/// record at or before the instant, dropped again once that record shows an
/// exit or an unserved state. Throws UsageError outside [0, max timestamp].
std::map<std::string, TraceRecord> checkpoint(const Trace& trace, std::int64_t at_ms);

struct WorkloadSummary {
  std::int64_t rows = 0;
  std::int64_t assigned_rows = 0;
  std::int64_t infeasible_rows = 0;
  std::int64_t budget_violations = 0;
  std::int64_t level_changes = 0;
  std::int64_t migrations = 0;       // (cluster, cores) changed
  PowerMw mean_power_mw;             // over assigned rows
};

struct TraceSummary {
  std::map<std::string, WorkloadSummary> per_workload;
  std::int64_t invocations = 0;      // distinct (at_ms, event_tag) groups
  PowerMw mean_platform_power_mw;    // over invocations
  PowerMw peak_platform_power_mw;
  std::int64_t first_ms = 0;
  std::int64_t last_ms = 0;
};

/// Aggregates computed exactly from the rows; needs nothing but the trace.
/// Throws Error for an empty trace.
TraceSummary summarize(const Trace& trace);

/// Deterministic plain-text rendering of a summary.
std::string format_summary(const TraceSummary& summary);

} // namespace edgertm
