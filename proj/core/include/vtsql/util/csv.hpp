#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vtsql {

struct CsvRecord {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

// RFC 4180: comma separated, double-quote quoting with "" escapes, CRLF or
// LF line endings. Blank lines are skipped.
std::vector<CsvRecord> parse_csv(std::string_view text);

std::string csv_escape(std::string_view field);

}  // namespace vtsql
