#include "edgertm/trace.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "edgertm/errors.hpp"

namespace edgertm {

const char* const kTraceCsvHeader =
    "at_ms,workload_id,config_level,cluster,cores,freq_mhz,pred_time_ms,pred_energy_mj,"
    "pred_power_mw,accuracy,platform_power_mw,event_tag,rationale";

namespace {

void append_opt_fixed(std::string& out, const std::optional<Fixed3>& value) {
  if (value) out += value->str();
}

void append_opt_int(std::string& out, const std::optional<int>& value) {
  if (value) out += std::to_string(*value);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::optional<Fixed3> opt_fixed(const std::string& text, const char* name, int line) {
  if (text.empty()) return std::nullopt;
  auto value = Fixed3::parse(text);
  if (!value)
    throw ParseError("trace row " + std::to_string(line) + ": bad " + std::string(name), line);
  return value;
}

std::optional<int> opt_int(const std::string& text, const char* name, int line) {
  if (text.empty()) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("trace row " + std::to_string(line) + ": bad " + std::string(name), line);
  return value;
}

} // namespace

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << kTraceCsvHeader << '\n';
  std::string line;
  for (const auto& r : trace) {
    line.clear();
    line += std::to_string(r.at_ms);
    line += ',';
    line += r.workload_id;
    line += ',';
    append_opt_fixed(line, r.config_level);
    line += ',';
    line += r.cluster;
    line += ',';
    append_opt_int(line, r.cores);
    line += ',';
    append_opt_int(line, r.freq_mhz);
    line += ',';
    append_opt_fixed(line, r.pred_time_ms);
    line += ',';
    append_opt_fixed(line, r.pred_energy_mj);
    line += ',';
    append_opt_fixed(line, r.pred_power_mw);
    line += ',';
    append_opt_fixed(line, r.accuracy);
    line += ',';
    line += r.platform_power_mw.str();
    line += ',';
    line += r.event_tag;
    line += ',';
    line += r.rationale;
    line += '\n';
    out << line;
  }
}

Trace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trace: missing header", 1);
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  if (line != kTraceCsvHeader) throw ParseError("bad trace header", 1);

  Trace trace;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_fields(line);
    if (fields.size() != 13)
      throw ParseError("trace row " + std::to_string(line_no) + ": expected 13 fields", line_no);
    TraceRecord r;
    auto at = opt_int(fields[0], "at_ms", line_no);
    if (!at) throw ParseError("trace row " + std::to_string(line_no) + ": missing at_ms", line_no);
    r.at_ms = *at;
    r.workload_id = fields[1];
    r.config_level = opt_fixed(fields[2], "config_level", line_no);
    r.cluster = fields[3];
    r.cores = opt_int(fields[4], "cores", line_no);
    r.freq_mhz = opt_int(fields[5], "freq_mhz", line_no);
    r.pred_time_ms = opt_fixed(fields[6], "pred_time_ms", line_no);
    r.pred_energy_mj = opt_fixed(fields[7], "pred_energy_mj", line_no);
    r.pred_power_mw = opt_fixed(fields[8], "pred_power_mw", line_no);
    r.accuracy = opt_fixed(fields[9], "accuracy", line_no);
    auto platform_power = opt_fixed(fields[10], "platform_power_mw", line_no);
    if (!platform_power)
      throw ParseError("trace row " + std::to_string(line_no) + ": missing platform_power_mw", line_no);
    r.platform_power_mw = *platform_power;
    r.event_tag = fields[11];
    r.rationale = fields[12];
    trace.push_back(std::move(r));
  }
  return trace;
}

std::map<std::string, TraceRecord> checkpoint(const Trace& trace, std::int64_t at_ms) {
  if (trace.empty()) throw Error("checkpoint: empty trace");
  std::int64_t horizon = 0;
  for (const auto& r : trace) horizon = std::max(horizon, r.at_ms);
  if (at_ms < 0 || at_ms > horizon)
    throw UsageError("checkpoint: " + std::to_string(at_ms) + " ms is outside [0, " +
                     std::to_string(horizon) + "]");

  std::map<std::string, TraceRecord> last;
  for (const auto& r : trace) {
    if (r.at_ms > at_ms) break;  // rows are time-ordered
    last[r.workload_id] = r;
  }
  // A workload whose latest row shows no assignment (exit marker or an
  // unserved instant) has nothing in force.
  for (auto it = last.begin(); it != last.end();)
    it = it->second.assigned() ? std::next(it) : last.erase(it);
  return last;
}

TraceSummary summarize(const Trace& trace) {
  if (trace.empty()) throw Error("summarize: empty trace");

  TraceSummary summary;
  summary.first_ms = trace.front().at_ms;
  summary.last_ms = trace.front().at_ms;

  std::map<std::string, Fixed3> power_sum;
  std::map<std::string, TraceRecord> last_assigned;
  std::pair<std::int64_t, std::string> current_group{-1, ""};
  Fixed3 platform_sum;

  for (const auto& r : trace) {
    summary.first_ms = std::min(summary.first_ms, r.at_ms);
    summary.last_ms = std::max(summary.last_ms, r.at_ms);

    auto& w = summary.per_workload[r.workload_id];
    w.rows += 1;
    if (r.rationale.find("violation:") != std::string::npos) w.budget_violations += 1;
    if (r.rationale.find("infeasible:" + r.workload_id) != std::string::npos && !r.assigned())
      w.infeasible_rows += 1;
    if (r.assigned()) {
      w.assigned_rows += 1;
      if (r.pred_power_mw) power_sum[r.workload_id] += *r.pred_power_mw;
      auto it = last_assigned.find(r.workload_id);
      if (it != last_assigned.end()) {
        const auto& prev = it->second;
        if (prev.config_level != r.config_level) w.level_changes += 1;
        if (prev.cluster != r.cluster || prev.cores != r.cores) w.migrations += 1;
      }
      last_assigned[r.workload_id] = r;
    }

    std::pair<std::int64_t, std::string> group{r.at_ms, r.event_tag};
    if (group != current_group) {
      current_group = group;
      summary.invocations += 1;
      platform_sum += r.platform_power_mw;
      summary.peak_platform_power_mw = std::max(summary.peak_platform_power_mw, r.platform_power_mw);
    }
  }

  for (auto& [id, w] : summary.per_workload)
    if (w.assigned_rows > 0) w.mean_power_mw = Fixed3::div_round(power_sum[id], w.assigned_rows);
  if (summary.invocations > 0)
    summary.mean_platform_power_mw = Fixed3::div_round(platform_sum, summary.invocations);
  return summary;
}

std::string format_summary(const TraceSummary& summary) {
  std::ostringstream out;
  out << "trace summary: " << summary.first_ms << ".." << summary.last_ms << " ms, "
      << summary.invocations << " invocations\n";
  for (const auto& [id, w] : summary.per_workload) {
    out << "workload " << id << ": rows=" << w.rows << " assigned=" << w.assigned_rows
        << " infeasible=" << w.infeasible_rows << " violations=" << w.budget_violations
        << " level_changes=" << w.level_changes << " migrations=" << w.migrations
        << " mean_power_mw=" << w.mean_power_mw.str() << "\n";
  }
  out << "platform: mean_power_mw=" << summary.mean_platform_power_mw.str()
      << " peak_power_mw=" << summary.peak_platform_power_mw.str() << "\n";
  return out.str();
}

} // namespace edgertm
