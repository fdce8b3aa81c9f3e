#include <catch2/catch_amalgamated.hpp>

#include "dirfuzz/targets.hpp"

using namespace dirfuzz;

TEST_CASE("targets: ids follow declaration order") {
  auto tps = parse_targets(R"(
[[target]]
file = "valid.c"
line = 1189

[[target]]
file = "objdump.c"
line = 2435
)");
  REQUIRE(tps.size() == 2);
  CHECK(tps[0] == TargetPoint{0, "valid.c", 1189});
  CHECK(tps[1] == TargetPoint{1, "objdump.c", 2435});
}

TEST_CASE("targets: empty list is rejected") {
  CHECK_THROWS_WITH(parse_targets(""), Catch::Matchers::ContainsSubstring("at least one"));
}

TEST_CASE("targets: non-positive line is rejected") {
  CHECK_THROWS_AS(parse_targets("[[target]]\nfile = \"a.c\"\nline = 0"), ValidationError);
}

TEST_CASE("targets: duplicate pairs are rejected") {
  CHECK_THROWS_AS(parse_targets(R"(
[[target]]
file = "a.c"
line = 3
[[target]]
file = "a.c"
line = 3
)"),
                  ValidationError);
}
