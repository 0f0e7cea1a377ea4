#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace metacorr {

// One parsed CSV record plus the 1-based line it started on.
struct CsvRow {
  std::vector<std::string> fields;
  int line = 0;
};

// Minimal CSV reader: comma separated, double-quote quoting with "" escapes,
// CRLF tolerant. Lines whose first non-blank character is '#' are comments;
// blank lines are skipped. Quoted fields may span lines.
std::vector<CsvRow> parse_csv(std::string_view text);

// Reads and parses a file; throws std::runtime_error on I/O failure.
std::vector<CsvRow> read_csv(const std::string& path);

}  // namespace metacorr
