#include <stdexcept>
#include <cstdlib>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ustatboot/csv.hpp"
#include "ustatboot/report.hpp"

using namespace ustatboot;

TEST_CASE("csv with a header row") {
  std::istringstream in("a,b\n1,2\n3.5,-4e2\n");
  const auto table = parse_csv(in, "test");
  CHECK(table.had_header);
  CHECK(table.header == std::vector<std::string>{"a", "b"});
  CHECK(table.values.rows() == 2);
  CHECK(table.values(0, 0) == 1.0);
  CHECK(table.values(1, 1) == -400.0);
}

TEST_CASE("csv without a header row") {
  std::istringstream in("1,2\n3,4\n");
  const auto table = parse_csv(in, "test");
  CHECK_FALSE(table.had_header);
  CHECK(table.values.rows() == 2);
}

TEST_CASE("ragged rows cite the offending line") {
  std::istringstream in("1,2\n3\n");
  try {
    parse_csv(in, "bad.csv");
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("row 2") != std::string::npos);
    CHECK(what.find("bad.csv") != std::string::npos);
  }
}

TEST_CASE("non-numeric cells cite row and column") {
  std::istringstream in("1,2\n3,oops\n");
  try {
    parse_csv(in, "bad.csv");
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("row 2") != std::string::npos);
    CHECK(what.find("column 2") != std::string::npos);
    CHECK(what.find("oops") != std::string::npos);
  }
}

TEST_CASE("empty input is an error") {
  std::istringstream in("\n\n");
  CHECK_THROWS_AS(parse_csv(in, "empty"), std::invalid_argument);
}

TEST_CASE("csv round-trips through write and parse") {
  Matrix m(2, 3);
  m(0, 0) = 1.0 / 3.0;
  m(0, 1) = -2.718281828459045;
  m(0, 2) = 1e-300;
  m(1, 0) = 0.1;
  m(1, 1) = 12345678901234567.0;
  m(1, 2) = -0.0;
  std::ostringstream out;
  write_csv(out, m, {"x", "y", "z"});
  std::istringstream in(out.str());
  const auto table = parse_csv(in, "roundtrip");
  CHECK(table.had_header);
  REQUIRE(table.values.rows() == 2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c) CHECK(table.values(r, c) == m(r, c));
}

TEST_CASE("doubles are printed round-trip exactly") {
  for (const double v : {1.0 / 3.0, 0.1, 3.141592653589793, 1e300, -4.9e-324, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("fnv1a64 matches the published vectors") {
  CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar", 6) == 0x85944171f73967e8ULL);
}

TEST_CASE("json trees serialize deterministically") {
  Json obj = Json::object();
  obj.set("name", "u\"stat\n");
  obj.set("count", std::uint64_t{42});
  obj.set("value", 1.0 / 3.0);
  Json arr = Json::array();
  arr.push(Json(true));
  arr.push(Json());
  obj.set("items", std::move(arr));

  const std::string compact = obj.dump();
  CHECK(compact ==
        "{\"name\":\"u\\\"stat\\n\",\"count\":42,"
        "\"value\":0.33333333333333331,\"items\":[true,null]}");
  CHECK(obj.dump() == compact);  // stable across calls

  const std::string pretty = obj.dump(2);
  CHECK(pretty.find("\"count\": 42") != std::string::npos);
}

TEST_CASE("manifest json carries the provenance fields") {
  RunManifest manifest;
  manifest.command = "boot";
  manifest.parameters.set("B", std::uint64_t{1000});
  manifest.seed = 7;
  manifest.input_digests.emplace_back("data.csv", 0x1234ULL);
  const std::string s = manifest_json(manifest).dump();
  CHECK(s.find("\"command\":\"boot\"") != std::string::npos);
  CHECK(s.find("\"seed\":7") != std::string::npos);
  CHECK(s.find("\"version\":\"0.1.0\"") != std::string::npos);
  CHECK(s.find("\"fnv1a64\":4660") != std::string::npos);
  CHECK(s.find("created_utc") != std::string::npos);
}
