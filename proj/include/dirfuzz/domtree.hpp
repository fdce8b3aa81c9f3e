#pragma once

// Immediate-dominator trees over program graphs, computed with the
// iterative data-flow scheme of Cooper, Harvey and Kennedy ("A Simple,
// Fast Dominance Algorithm"). Nodes unreachable from the entry are
// excluded from the tree; their count is kept for reporting.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dirfuzz/errors.hpp"
#include "dirfuzz/graph.hpp"

namespace dirfuzz {

struct DominatorTree {
  std::string root;
  std::map<std::string, std::string> parent;  // node -> immediate dominator; root absent
  std::map<std::string, int> depth;           // root depth = 1
  std::map<std::string, std::vector<std::string>> children;
  int max_depth = 1;
  int unreachable_count = 0;

  bool contains(const std::string& n) const { return depth.count(n) != 0; }

  friend bool operator==(const DominatorTree&, const DominatorTree&) = default;
};

namespace detail {

// Reverse postorder over the subgraph reachable from entry, successors
// visited in edge declaration order. Iterative DFS to keep deep chains
// off the call stack.
inline std::vector<std::string> reverse_postorder(const ProgramGraph& g) {
  std::vector<std::string> postorder;
  std::set<std::string> visited;
  std::vector<std::pair<std::string, size_t>> stack;  // (node, next successor index)
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& n : g.nodes) succ[n.id] = g.successors(n.id);

  visited.insert(g.entry);
  stack.emplace_back(g.entry, 0);
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    const auto& next = succ[node];
    if (idx < next.size()) {
      const std::string& s = next[idx++];
      if (visited.insert(s).second) stack.emplace_back(s, 0);
    } else {
      postorder.push_back(node);
      stack.pop_back();
    }
  }
  std::reverse(postorder.begin(), postorder.end());
  return postorder;
}

}  // namespace detail

inline DominatorTree compute_domtree(const ProgramGraph& g) {
  g.validate();
  std::vector<std::string> order = detail::reverse_postorder(g);
  std::map<std::string, int> rpo_index;
  for (size_t i = 0; i < order.size(); ++i) rpo_index[order[i]] = static_cast<int>(i);

  // idom as an index into `order`; entry maps to itself.
  std::vector<int> idom(order.size(), -1);
  idom[0] = 0;

  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (a > b) a = idom[a];
      while (b > a) b = idom[b];
    }
    return a;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 1; i < order.size(); ++i) {
      int new_idom = -1;
      for (const std::string& p : g.predecessors(order[i])) {
        auto it = rpo_index.find(p);
        if (it == rpo_index.end()) continue;  // unreachable predecessor
        int pi = it->second;
        if (idom[pi] < 0) continue;  // not processed yet
        new_idom = new_idom < 0 ? pi : intersect(new_idom, pi);
      }
      if (new_idom >= 0 && idom[i] != new_idom) {
        idom[i] = new_idom;
        changed = true;
      }
    }
  }

  DominatorTree tree;
  tree.root = g.entry;
  tree.depth[g.entry] = 1;
  tree.children[g.entry];
  for (size_t i = 1; i < order.size(); ++i) {
    const std::string& dom = order[idom[i]];
    tree.parent[order[i]] = dom;
    tree.children[dom].push_back(order[i]);
    tree.children[order[i]];
  }
  // Depths via the RPO order: a node's idom always precedes it.
  for (size_t i = 1; i < order.size(); ++i) {
    tree.depth[order[i]] = tree.depth[order[idom[i]]] + 1;
    tree.max_depth = std::max(tree.max_depth, tree.depth[order[i]]);
  }
  tree.unreachable_count = static_cast<int>(g.nodes.size() - order.size());
  return tree;
}

// Test oracle implementing the dominance relation directly: m dominates n
// iff every entry->n path passes through m, checked by deleting m and
// retesting reachability.
inline std::set<std::string> dominators_brute_force(const ProgramGraph& g, const std::string& n) {
  auto reachable = [&](const std::string& target, const std::string& removed) {
    if (g.entry == removed) return false;
    std::set<std::string> visited{g.entry};
    std::vector<std::string> queue{g.entry};
    while (!queue.empty()) {
      std::string cur = queue.back();
      queue.pop_back();
      if (cur == target) return true;
      for (const auto& s : g.successors(cur)) {
        if (s == removed) continue;
        if (visited.insert(s).second) queue.push_back(s);
      }
    }
    return false;
  };

  if (!g.find_node(n)) throw ValidationError("unknown node '" + n + "'");
  if (!reachable(n, ""))
    throw ValidationError("node '" + n + "' is unreachable from the entry");

  std::set<std::string> doms{n};
  for (const auto& m : g.nodes) {
    if (m.id == n) continue;
    if (!reachable(n, m.id)) doms.insert(m.id);
  }
  return doms;
}

// Chain from the root down to n, inclusive: [root, ..., idom(n), n].
inline std::vector<std::string> ancestors_to_root(const DominatorTree& tree,
                                                  const std::string& n) {
  if (!tree.contains(n)) throw ValidationError("node '" + n + "' is not in the dominator tree");
  std::vector<std::string> chain;
  std::string cur = n;
  chain.push_back(cur);
  while (cur != tree.root) {
    cur = tree.parent.at(cur);
    chain.push_back(cur);
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

// Renders the tree as a graph sharing the source graph's node data, with
// edges meaning "immediately dominates". Used for DOT exports.
inline ProgramGraph domtree_to_graph(const DominatorTree& tree, const ProgramGraph& source) {
  ProgramGraph g;
  g.kind = source.kind;
  g.name = source.name.empty() ? "domtree" : "domtree: " + source.name;
  g.entry = tree.root;
  for (const auto& n : source.nodes)
    if (tree.contains(n.id)) g.nodes.push_back(n);
  for (const auto& n : g.nodes)
    for (const auto& child : tree.children.at(n.id)) g.add_edge(n.id, child);
  return g;
}

}  // namespace dirfuzz
