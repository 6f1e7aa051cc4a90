#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "edgertm/operating_point.hpp"

namespace edgertm {

/// Column order of the CSV schema and of the JSON object mirror.
/// `workload_id,platform,cluster,cores,freq_mhz,config_pct,time_ms,power_mw,energy_mj,top1_acc`
extern const char* const kTableCsvHeader;

enum class TableFormat { csv, json };

/// Infers csv/json from the file extension; anything else throws UsageError.
TableFormat table_format_of(const std::filesystem::path& path);

OperatingPointTable load_table(std::istream& in, TableFormat format);
OperatingPointTable load_table(const std::filesystem::path& path);

void write_table_csv(const OperatingPointTable& table, std::ostream& out);
void write_table_json(const OperatingPointTable& table, std::ostream& out);

/// One CSV row of the table schema, no trailing newline.
std::string table_csv_row(const OperatingPoint& point);

/// Per-row validation outcome for `edge-rtm validate`.
struct RowStatus {
  int line = 0;            // 1-based input line
  bool ok = true;
  std::string message;     // diagnostic when !ok
};

struct ValidationReport {
  std::vector<RowStatus> rows;
  std::vector<std::string> table_errors;  // cross-row diagnostics
  bool ok() const;
};

/// Full-scan validation: parses and checks every row, collecting all
/// diagnostics instead of stopping at the first. File-level problems
/// (missing file, bad header) still throw.
ValidationReport validate_table_file(const std::filesystem::path& path);

} // namespace edgertm
