#include <catch2/catch_amalgamated.hpp>

#include "dirfuzz/toml.hpp"

using namespace dirfuzz;

TEST_CASE("toml: scalars and arrays") {
  auto root = toml::parse(R"(
# comment
name = "demo"
count = 42
ratio = 0.75
flag = true
items = ["a", "b"]
nums = [1, 2, 3]
)");
  CHECK(root.get_string("name") == "demo");
  CHECK(root.get_int("count") == 42);
  CHECK(root.get_double("ratio") == 0.75);
  CHECK(root.get_double("count") == 42.0);
  CHECK(root.get_bool("flag"));
  CHECK(root.get_string_array("items") == std::vector<std::string>{"a", "b"});
  CHECK(root.find_value("nums")->as_array().size() == 3);
}

TEST_CASE("toml: tables and arrays of tables") {
  auto root = toml::parse(R"(
[owner]
name = "x"

[[target]]
file = "valid.c"
line = 1189

[[target]]
file = "objdump.c"
line = 2435
)");
  REQUIRE(root.find_table("owner"));
  CHECK(root.find_table("owner")->get_string("name") == "x");
  const auto* targets = root.find_table_array("target");
  REQUIRE(targets);
  REQUIRE(targets->size() == 2);
  CHECK((*targets)[0].get_string("file") == "valid.c");
  CHECK((*targets)[1].get_int("line") == 2435);
}

TEST_CASE("toml: nested array-of-tables attach to the last parent element") {
  auto root = toml::parse(R"(
[[ets]]
id = 0

[[ets.element]]
node = "a"

[[ets.element]]
node = "b"

[[ets]]
id = 1

[[ets.element]]
node = "c"
)");
  const auto* ets = root.find_table_array("ets");
  REQUIRE(ets);
  REQUIRE(ets->size() == 2);
  const auto* first = (*ets)[0].find_table_array("element");
  const auto* second = (*ets)[1].find_table_array("element");
  REQUIRE(first);
  REQUIRE(second);
  CHECK(first->size() == 2);
  CHECK(second->size() == 1);
  CHECK((*second)[0].get_string("node") == "c");
}

TEST_CASE("toml: sub-table of the current array element") {
  auto root = toml::parse(R"(
[[block]]
id = "br1"
[block.branch]
byte = 0
cmp = "gt"
)");
  const auto* blocks = root.find_table_array("block");
  REQUIRE(blocks);
  const auto* branch = (*blocks)[0].find_table("branch");
  REQUIRE(branch);
  CHECK(branch->get_int("byte") == 0);
  CHECK(branch->get_string("cmp") == "gt");
}

TEST_CASE("toml: errors carry line numbers") {
  CHECK_THROWS_AS(toml::parse("key = "), ParseError);
  CHECK_THROWS_AS(toml::parse("key \"x\""), ParseError);
  CHECK_THROWS_AS(toml::parse("a = 1\na = 2"), ParseError);
  try {
    toml::parse("ok = 1\nbad =");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("toml: dump/parse round trip") {
  toml::Table root;
  root.set("schema", "demo-v1");
  root.set("ratio", 0.4375);
  root.set("whole", 3.0);
  auto& arr = root.open_table_array("item");
  toml::Table t;
  t.set("name", "first");
  t.set("weights", toml::Array{toml::Value(0.5), toml::Value(1.0)});
  arr.push_back(std::move(t));

  std::string text = toml::dump(root);
  auto parsed = toml::parse(text);
  CHECK(parsed.get_string("schema") == "demo-v1");
  CHECK(parsed.get_double("ratio") == 0.4375);
  CHECK(parsed.get_double("whole") == 3.0);
  const auto* items = parsed.find_table_array("item");
  REQUIRE(items);
  CHECK((*items)[0].get_string("name") == "first");
  CHECK((*items)[0].find_value("weights")->as_array()[1].as_double() == 1.0);
}

TEST_CASE("toml: string escapes survive a round trip") {
  toml::Table root;
  root.set("path", "a\\b \"c\"\nd");
  auto parsed = toml::parse(toml::dump(root));
  CHECK(parsed.get_string("path") == "a\\b \"c\"\nd");
}
