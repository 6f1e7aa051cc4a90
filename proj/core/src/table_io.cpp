#include "edgertm/table_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "edgertm/errors.hpp"

namespace edgertm {

const char* const kTableCsvHeader =
    "workload_id,platform,cluster,cores,freq_mhz,config_pct,time_ms,power_mw,energy_mj,top1_acc";

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
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

int parse_int_field(const std::string& text, const char* name, int line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("row " + std::to_string(line) + ": bad " + std::string(name) + " '" + text + "'",
                     line);
  return value;
}

Fixed3 parse_fixed_field(const std::string& text, const char* name, int line) {
  auto value = Fixed3::parse(text);
  if (!value)
    throw ParseError("row " + std::to_string(line) + ": bad " + std::string(name) + " '" + text + "'",
                     line);
  return *value;
}

OperatingPoint point_from_fields(const std::vector<std::string>& fields, int line) {
  if (fields.size() != 10)
    throw ParseError("row " + std::to_string(line) + ": expected 10 fields, got " +
                         std::to_string(fields.size()),
                     line);
  OperatingPoint p;
  p.workload_id = fields[0];
  p.platform = fields[1];
  p.resource.cluster_id = fields[2];
  p.resource.core_count = parse_int_field(fields[3], "cores", line);
  p.resource.freq_mhz = parse_int_field(fields[4], "freq_mhz", line);
  p.config_pct = parse_fixed_field(fields[5], "config_pct", line);
  p.exec_time_ms = parse_fixed_field(fields[6], "time_ms", line);
  p.power_mw = parse_fixed_field(fields[7], "power_mw", line);
  p.energy_mj = parse_fixed_field(fields[8], "energy_mj", line);
  p.accuracy_pct = parse_fixed_field(fields[9], "top1_acc", line);
  return p;
}

/// Parses the stream into (points, line numbers) without table validation.
std::pair<std::vector<OperatingPoint>, std::vector<int>> parse_csv_rows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("empty input: missing header row", 1);
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  if (line != kTableCsvHeader)
    throw ParseError("bad header: expected '" + std::string(kTableCsvHeader) + "'", 1);

  std::vector<OperatingPoint> points;
  std::vector<int> lines;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    points.push_back(point_from_fields(split_csv_line(line), line_no));
    lines.push_back(line_no);
  }
  return {std::move(points), std::move(lines)};
}

Fixed3 fixed_from_json(const nlohmann::json& value, const char* name, int index) {
  if (value.is_string()) {
    auto parsed = Fixed3::parse(value.get<std::string>());
    if (!parsed)
      throw ParseError("entry " + std::to_string(index) + ": bad " + std::string(name), index);
    return *parsed;
  }
  if (!value.is_number())
    throw ParseError("entry " + std::to_string(index) + ": " + std::string(name) + " must be a number",
                     index);
  return Fixed3::from_double(value.get<double>());
}

std::pair<std::vector<OperatingPoint>, std::vector<int>> parse_json_rows(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("json parse error: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("json table must be an array of objects");

  std::vector<OperatingPoint> points;
  std::vector<int> lines;
  int index = 0;
  for (const auto& row : doc) {
    ++index;
    if (!row.is_object())
      throw ParseError("entry " + std::to_string(index) + ": expected an object", index);
    for (const char* field : {"workload_id", "platform", "cluster", "cores", "freq_mhz",
                              "config_pct", "time_ms", "power_mw", "energy_mj", "top1_acc"})
      if (!row.contains(field))
        throw ParseError("entry " + std::to_string(index) + ": missing field '" + field + "'", index);
    OperatingPoint p;
    p.workload_id = row.at("workload_id").get<std::string>();
    p.platform = row.at("platform").get<std::string>();
    p.resource.cluster_id = row.at("cluster").get<std::string>();
    p.resource.core_count = row.at("cores").get<int>();
    p.resource.freq_mhz = row.at("freq_mhz").get<int>();
    p.config_pct = fixed_from_json(row.at("config_pct"), "config_pct", index);
    p.exec_time_ms = fixed_from_json(row.at("time_ms"), "time_ms", index);
    p.power_mw = fixed_from_json(row.at("power_mw"), "power_mw", index);
    p.energy_mj = fixed_from_json(row.at("energy_mj"), "energy_mj", index);
    p.accuracy_pct = fixed_from_json(row.at("top1_acc"), "top1_acc", index);
    points.push_back(std::move(p));
    lines.push_back(index);
  }
  return {std::move(points), std::move(lines)};
}

} // namespace

TableFormat table_format_of(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".csv") return TableFormat::csv;
  if (ext == ".json") return TableFormat::json;
  throw UsageError("cannot infer table format from '" + path.string() + "' (use .csv or .json)");
}

OperatingPointTable load_table(std::istream& in, TableFormat format) {
  auto [points, lines] =
      format == TableFormat::csv ? parse_csv_rows(in) : parse_json_rows(in);
  return OperatingPointTable::build(std::move(points), &lines);
}

OperatingPointTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return load_table(in, table_format_of(path));
}

std::string table_csv_row(const OperatingPoint& p) {
  std::string out;
  out += p.workload_id;
  out += ',';
  out += p.platform;
  out += ',';
  out += p.resource.cluster_id;
  out += ',';
  out += std::to_string(p.resource.core_count);
  out += ',';
  out += std::to_string(p.resource.freq_mhz);
  out += ',';
  out += p.config_pct.str();
  out += ',';
  out += p.exec_time_ms.str();
  out += ',';
  out += p.power_mw.str();
  out += ',';
  out += p.energy_mj.str();
  out += ',';
  out += p.accuracy_pct.str();
  return out;
}

void write_table_csv(const OperatingPointTable& table, std::ostream& out) {
  out << kTableCsvHeader << '\n';
  for (const auto& p : table.points()) out << table_csv_row(p) << '\n';
}

void write_table_json(const OperatingPointTable& table, std::ostream& out) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : table.points()) {
    nlohmann::json row;
    row["workload_id"] = p.workload_id;
    row["platform"] = p.platform;
    row["cluster"] = p.resource.cluster_id;
    row["cores"] = p.resource.core_count;
    row["freq_mhz"] = p.resource.freq_mhz;
    row["config_pct"] = p.config_pct.to_double();
    row["time_ms"] = p.exec_time_ms.to_double();
    row["power_mw"] = p.power_mw.to_double();
    row["energy_mj"] = p.energy_mj.to_double();
    row["top1_acc"] = p.accuracy_pct.to_double();
    rows.push_back(std::move(row));
  }
  out << rows.dump(2) << '\n';
}

bool ValidationReport::ok() const {
  if (!table_errors.empty()) return false;
  for (const auto& row : rows)
    if (!row.ok) return false;
  return true;
}

ValidationReport validate_table_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  auto format = table_format_of(path);

  auto [points, lines] =
      format == TableFormat::csv ? parse_csv_rows(in) : parse_json_rows(in);

  ValidationReport report;
  report.rows.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    report.rows.push_back({lines[i], true, {}});

  // Re-run the table build row by row so every offending row is reported,
  // not just the first: probe each prefix extension.
  try {
    OperatingPointTable::build(points, &lines);
    return report;
  } catch (const Error&) {
    // fall through to per-row probing
  }

  std::vector<OperatingPoint> good;
  std::vector<int> good_lines;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto probe_points = good;
    auto probe_lines = good_lines;
    probe_points.push_back(points[i]);
    probe_lines.push_back(lines[i]);
    try {
      OperatingPointTable::build(probe_points, &probe_lines);
      good = std::move(probe_points);
      good_lines = std::move(probe_lines);
    } catch (const Error& e) {
      report.rows[i].ok = false;
      report.rows[i].message = e.what();
    }
  }
  return report;
}

} // namespace edgertm
