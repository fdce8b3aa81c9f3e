#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dirfuzz/errors.hpp"

namespace dirfuzz {

struct SourceLocation {
  std::string file;
  int start_line = 1;
  int end_line = 1;
  std::optional<int> start_column;

  bool contains_line(int line) const { return line >= start_line && line <= end_line; }

  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

enum class MembershipKind { TargetPoint, Intermediate };

inline const char* membership_name(MembershipKind k) {
  return k == MembershipKind::TargetPoint ? "point" : "member";
}

struct GraphNode {
  std::string id;     // DOT node name
  std::string label;  // raw label text; record braces preserved as parsed
  std::optional<SourceLocation> location;
  std::map<int, MembershipKind> ets_memberships;
  std::map<int, double> weights;
  // Unrecognized DOT attributes, carried through for round-trips.
  std::vector<std::pair<std::string, std::string>> extra_attrs;

  // Function/block name: the label with record braces stripped, or the id
  // when no label was given.
  std::string name() const {
    std::string n = label;
    std::erase(n, '{');
    std::erase(n, '}');
    return n.empty() ? id : n;
  }

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  std::string from;
  std::string to;
  bool indirect = false;
  std::vector<std::pair<std::string, std::string>> extra_attrs;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
  friend auto operator<=>(const GraphEdge&, const GraphEdge&) = default;
};

struct GraphKind {
  bool call_graph = true;
  std::string function;  // set for control-flow graphs

  static GraphKind cg() { return {true, {}}; }
  static GraphKind cfg(std::string fn) { return {false, std::move(fn)}; }

  // Short tag used in configs and reports: "cg" or "cfg:<function>".
  std::string tag() const { return call_graph ? "cg" : "cfg:" + function; }

  static GraphKind from_tag(std::string_view tag) {
    if (tag == "cg") return cg();
    if (tag.starts_with("cfg:")) return cfg(std::string(tag.substr(4)));
    throw ValidationError("unknown graph kind tag '" + std::string(tag) + "'");
  }

  friend bool operator==(const GraphKind&, const GraphKind&) = default;
};

struct ProgramGraph {
  GraphKind kind;
  std::string name;  // digraph name as parsed
  std::vector<std::pair<std::string, std::string>> graph_attrs;
  std::vector<GraphNode> nodes;  // declaration order
  std::vector<GraphEdge> edges;  // declaration order; duplicates allowed
  std::string entry;

  const GraphNode* find_node(std::string_view id) const {
    for (const auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }
  GraphNode* find_node(std::string_view id) {
    for (auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }

  const GraphNode& node_at(std::string_view id) const {
    const GraphNode* n = find_node(id);
    if (!n) throw ValidationError("unknown node '" + std::string(id) + "'");
    return *n;
  }

  GraphNode& add_node(GraphNode n) {
    if (find_node(n.id)) throw ValidationError("duplicate node id '" + n.id + "'");
    nodes.push_back(std::move(n));
    return nodes.back();
  }

  void add_edge(std::string from, std::string to, bool indirect = false) {
    edges.push_back({std::move(from), std::move(to), indirect, {}});
  }

  bool has_edge(std::string_view from, std::string_view to) const {
    for (const auto& e : edges)
      if (e.from == from && e.to == to) return true;
    return false;
  }

  // Distinct direct successors of a node, in first-edge order.
  std::vector<std::string> successors(std::string_view id) const {
    std::vector<std::string> out;
    for (const auto& e : edges) {
      if (e.from != id) continue;
      if (std::find(out.begin(), out.end(), e.to) == out.end()) out.push_back(e.to);
    }
    return out;
  }

  std::vector<std::string> predecessors(std::string_view id) const {
    std::vector<std::string> out;
    for (const auto& e : edges) {
      if (e.to != id) continue;
      if (std::find(out.begin(), out.end(), e.from) == out.end()) out.push_back(e.from);
    }
    return out;
  }

  void validate() const {
    std::set<std::string_view> ids;
    for (const auto& n : nodes) {
      if (!ids.insert(n.id).second)
        throw ValidationError("duplicate node id '" + n.id + "'");
      if (n.location) {
        if (n.location->file.empty())
          throw ValidationError("node '" + n.id + "' has an empty file name");
        if (n.location->start_line > n.location->end_line)
          throw ValidationError("node '" + n.id + "' has start line after end line");
        if (n.location->start_line <= 0)
          throw ValidationError("node '" + n.id + "' has a non-positive start line");
      }
      for (const auto& [ets_id, w] : n.weights) {
        auto it = n.ets_memberships.find(ets_id);
        if (it == n.ets_memberships.end())
          throw ValidationError("node '" + n.id + "' has a weight for sequence " +
                                std::to_string(ets_id) + " without a membership entry");
        if (!(w > 0.0 && w <= 1.0))
          throw ValidationError("node '" + n.id + "' has weight outside (0, 1]");
        if (it->second == MembershipKind::TargetPoint && w != 1.0)
          throw ValidationError("node '" + n.id + "' is a target point of sequence " +
                                std::to_string(ets_id) + " but its weight is not 1");
      }
    }
    for (const auto& e : edges) {
      if (!ids.count(e.from))
        throw ValidationError("edge references unknown node '" + e.from + "'");
      if (!ids.count(e.to))
        throw ValidationError("edge references unknown node '" + e.to + "'");
    }
    if (entry.empty() || !ids.count(entry))
      throw ValidationError("missing entry node" +
                            (entry.empty() ? std::string{} : " '" + entry + "'"));
  }

  // Structural equality: node and edge sets with all attributes, ignoring
  // declaration order.
  bool structurally_equal(const ProgramGraph& other) const {
    if (kind != other.kind || entry != other.entry || name != other.name) return false;
    if (graph_attrs != other.graph_attrs) return false;
    auto sorted_nodes = [](const ProgramGraph& g) {
      std::vector<GraphNode> v = g.nodes;
      std::sort(v.begin(), v.end(),
                [](const GraphNode& a, const GraphNode& b) { return a.id < b.id; });
      return v;
    };
    auto sorted_edges = [](const ProgramGraph& g) {
      std::vector<GraphEdge> v = g.edges;
      std::sort(v.begin(), v.end());
      return v;
    };
    return sorted_nodes(*this) == sorted_nodes(other) &&
           sorted_edges(*this) == sorted_edges(other);
  }
};

}  // namespace dirfuzz
