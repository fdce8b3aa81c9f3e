#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dirfuzz/dot.hpp"

using namespace dirfuzz;

namespace {

constexpr const char* kExampleCg = R"(digraph "Call graph: example.ll" {
    label="Call graph: example.ll";

    Node0x10 [shape=record, filename="/home/user/example/main.c", startline=5,endline=10,label="{foo}"];
    Node0x20 [shape=record, filename="/home/user/example/main.c", startline=12,endline=23,label="{main}"];
    Node0x20 -> Node0x10;
}
)";

// Random annotated graph; entry pinned through a graph attribute.
ProgramGraph random_graph(std::mt19937_64& rng, int max_nodes = 20) {
  auto below = [&](int n) { return static_cast<int>(rng() % n); };
  ProgramGraph g;
  g.kind = GraphKind::cfg("f");
  g.name = "R";
  int n = 1 + below(max_nodes);
  for (int i = 0; i < n; ++i) {
    GraphNode node;
    node.id = "n" + std::to_string(i);
    if (below(2)) node.label = "{block " + std::to_string(i) + "}";
    if (below(2)) {
      SourceLocation loc;
      loc.file = "dir/file" + std::to_string(below(3)) + ".c";
      loc.start_line = 1 + below(50);
      loc.end_line = loc.start_line + below(10);
      if (below(2)) loc.start_column = 1 + below(8);
      node.location = loc;
    }
    int memberships = below(3);
    for (int k = 0; k < memberships; ++k) {
      int ets_id = below(4);
      if (below(3) == 0) {
        node.ets_memberships[ets_id] = MembershipKind::TargetPoint;
        node.weights[ets_id] = 1.0;
      } else {
        node.ets_memberships[ets_id] = MembershipKind::Intermediate;
        node.weights[ets_id] = (1 + below(1000)) / 1000.0;
      }
    }
    if (below(4) == 0) node.extra_attrs.emplace_back("shape", "record");
    g.nodes.push_back(std::move(node));
  }
  int edges = below(2 * n + 1);
  for (int i = 0; i < edges; ++i)
    g.add_edge("n" + std::to_string(below(n)), "n" + std::to_string(below(n)), below(3) == 0);
  g.graph_attrs.emplace_back("entry", "n0");
  g.entry = "n0";
  return g;
}

}  // namespace

TEST_CASE("dot: example call graph parses") {
  ProgramGraph g = parse_dot(kExampleCg, GraphKind::cg());
  REQUIRE(g.nodes.size() == 2);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].from == "Node0x20");
  CHECK(g.edges[0].to == "Node0x10");
  CHECK_FALSE(g.edges[0].indirect);

  const GraphNode& foo = g.node_at("Node0x10");
  CHECK(foo.name() == "foo");
  REQUIRE(foo.location);
  CHECK(foo.location->file == "/home/user/example/main.c");
  CHECK(foo.location->start_line == 5);
  CHECK(foo.location->end_line == 10);

  CHECK(g.entry == "Node0x20");  // the node labeled main
  CHECK(g.node_at(g.entry).name() == "main");
}

TEST_CASE("dot: annotated node with memberships and weights") {
  std::string text = R"(digraph G {
    Node0x30 [shape=record, filename="/home/user/example/main.cpp", startline=52,endline=77,startcolumn=9, label="{main}", ts_kind="point/member",ts_numbers="0/1", w_val="1.0/0.435",w_numbers="0/1"];
})";
  ProgramGraph g = parse_dot(text, GraphKind::cg());
  const GraphNode& n = g.node_at("Node0x30");
  REQUIRE(n.ets_memberships.size() == 2);
  CHECK(n.ets_memberships.at(0) == MembershipKind::TargetPoint);
  CHECK(n.ets_memberships.at(1) == MembershipKind::Intermediate);
  REQUIRE(n.weights.size() == 2);
  CHECK(n.weights.at(0) == 1.0);
  CHECK(n.weights.at(1) == 0.435);
  REQUIRE(n.location);
  CHECK(n.location->start_column == 9);

  // Round trip keeps every annotation.
  ProgramGraph again = parse_dot(dump_dot(g), GraphKind::cg());
  CHECK(g.structurally_equal(again));
}

TEST_CASE("dot: empty digraph has no entry") {
  CHECK_THROWS_AS(parse_dot("digraph G {}", GraphKind::cg()), ValidationError);
}

TEST_CASE("dot: arity mismatch between w_val and w_numbers") {
  std::string text = R"(digraph G {
    a [label="{main}", ts_kind="point/member", ts_numbers="0/1", w_val="1.0", w_numbers="0/1"];
})";
  CHECK_THROWS_AS(parse_dot(text, GraphKind::cg()), ValidationError);

  std::string missing_pair = R"(digraph G {
    a [label="{main}", w_val="1.0"];
})";
  CHECK_THROWS_AS(parse_dot(missing_pair, GraphKind::cg()), ValidationError);
}

TEST_CASE("dot: malformed input reports a line") {
  try {
    parse_dot("digraph G {\n  a [label=];\n}", GraphKind::cg());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("dot: indirect edges, bare and explicit") {
  std::string text = R"(digraph G {
    main; foo;
    main -> foo [indirect];
    main -> foo [indirect=true];
    main -> foo;
})";
  ProgramGraph g = parse_dot(text, GraphKind::cg());
  REQUIRE(g.edges.size() == 3);
  CHECK(g.edges[0].indirect);
  CHECK(g.edges[1].indirect);
  CHECK_FALSE(g.edges[2].indirect);

  ProgramGraph again = parse_dot(dump_dot(g), GraphKind::cg());
  CHECK(g.structurally_equal(again));
}

TEST_CASE("dot: graph without edges dumps only node lines") {
  ProgramGraph g;
  g.kind = GraphKind::cfg("f");
  g.name = "G";
  g.add_node(GraphNode{.id = "solo"});
  g.entry = "solo";
  std::string text = dump_dot(g);
  CHECK(text.find("->") == std::string::npos);
  CHECK(text.find("solo") != std::string::npos);
}

TEST_CASE("dot: unknown attributes are preserved") {
  std::string text = R"(digraph G {
    entry="a";
    a [label="{a}", color="red", shape=record];
    b [style=dotted];
    a -> b [weight="3"];
})";
  ProgramGraph g = parse_dot(text, GraphKind::cfg("f"));
  ProgramGraph again = parse_dot(dump_dot(g), GraphKind::cfg("f"));
  CHECK(g.structurally_equal(again));
  CHECK(g.node_at("a").extra_attrs.size() == 2);
  CHECK(g.edges[0].extra_attrs.size() == 1);
}

TEST_CASE("dot: random graphs round trip") {
  std::mt19937_64 rng(0xD07D07);
  for (int trial = 0; trial < 200; ++trial) {
    ProgramGraph g = random_graph(rng);
    std::string text = dump_dot(g);
    ProgramGraph parsed = parse_dot(text, g.kind);
    REQUIRE(g.structurally_equal(parsed));
    // Dumping the parsed graph is byte-stable.
    CHECK(dump_dot(parsed) == text);
  }
}
