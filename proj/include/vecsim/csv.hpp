#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace vecsim {

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// RFC-4180 field quoting: fields with separators, quotes or line breaks are
// wrapped in quotes with embedded quotes doubled.
std::string csv_escape(std::string_view field);

std::vector<std::string> split_csv_line(std::string_view line);

// Writes `# key=value` comment lines, then a header row, then data rows.
class CsvWriter {
public:
  CsvWriter(const std::string& path, std::string_view fingerprint,
            std::initializer_list<std::string_view> header);

  CsvWriter& field(std::string_view s);
  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
  void end_row();

private:
  std::ofstream out_;
  bool first_ = true;
};

} // namespace vecsim
