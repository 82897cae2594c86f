#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "test_common.hpp"
#include "vecsim/csv.hpp"

using namespace vecsim;

TEST_CASE("doubles print in shortest round-trip form") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(720.0) == "720");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  for (double v : {1.0 / 3.0, 2.718281828459045, 1e-300, 123456789.125}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("fields are quoted only when needed") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("split_csv_line inverts escaping") {
  const std::vector<std::string> fields{"a,b", "say \"hi\"", "", "plain"};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_escape(fields[i]);
  CHECK(split_csv_line(line) == fields);
  CHECK(split_csv_line("1,2\r") == std::vector<std::string>{"1", "2"});
}

TEST_CASE("writer emits the fingerprint comment and header") {
  const auto dir = scratch_dir("csv");
  {
    CsvWriter w((dir / "t.csv").string(), "abc123", {"slot", "value"});
    w.field(0).field(0.25);
    w.end_row();
    w.field(1).field(std::string_view{});
    w.end_row();
  }
  CHECK(read_file(dir / "t.csv") == "# config_fingerprint=abc123\nslot,value\n0,0.25\n1,\n");
}
