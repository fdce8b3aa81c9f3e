#pragma once

// Context weights for sequence members. Each weight blends four structural
// signals of the node within its own graph/domtree pair: inverse graph
// distance to the target (indirect edges cost 2), relative domtree depth,
// the fraction of successors that still lead to the target, and inverse
// domtree branching.

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "dirfuzz/domtree.hpp"
#include "dirfuzz/ets.hpp"
#include "dirfuzz/graph.hpp"

namespace dirfuzz {

struct NodeMetrics {
  int distance_to_target = 0;  // 0 means "no path"
  int level = 1;
  int max_levels = 1;
  int rel_succ = 0;
  int succ = 0;
  int domsucc = 0;
};

// Cheapest path cost from i to j, edges costing 2 when indirect and 1
// otherwise. Returns 0 when j is not reachable from i; i to itself is 0.
inline int shortest_distance(const ProgramGraph& g, const std::string& i, const std::string& j) {
  if (i == j) return 0;
  std::map<std::string, std::vector<std::pair<std::string, int>>> adj;
  for (const auto& e : g.edges) adj[e.from].emplace_back(e.to, e.indirect ? 2 : 1);

  std::map<std::string, int> dist;
  using Item = std::pair<int, std::string>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[i] = 0;
  heap.push({0, i});
  while (!heap.empty()) {
    auto [d, node] = heap.top();
    heap.pop();
    if (d != dist[node]) continue;
    if (node == j) return d;
    for (const auto& [next, cost] : adj[node]) {
      int nd = d + cost;
      auto it = dist.find(next);
      if (it == dist.end() || nd < it->second) {
        dist[next] = nd;
        heap.push({nd, next});
      }
    }
  }
  return 0;
}

inline bool reachable(const ProgramGraph& g, const std::string& from, const std::string& to) {
  if (from == to) return true;
  std::set<std::string> visited{from};
  std::vector<std::string> queue{from};
  while (!queue.empty()) {
    std::string cur = queue.back();
    queue.pop_back();
    for (const auto& s : g.successors(cur)) {
      if (s == to) return true;
      if (visited.insert(s).second) queue.push_back(s);
    }
  }
  return false;
}

// Successors of i that lie on some path to t (i.e. t is reachable from
// them, counting a successor that is t itself).
inline int relevant_successors(const ProgramGraph& g, const std::string& i, const std::string& t) {
  int count = 0;
  for (const auto& s : g.successors(i))
    if (s == t || reachable(g, s, t)) ++count;
  return count;
}

// Four-term mean. Degenerate denominators resolve to the neutral reading:
// no path contributes no proximity, a graph leaf contributes no successor
// signal, a domtree leaf passes all flow to itself.
inline double context_weight(const NodeMetrics& m) {
  double distance_term = m.distance_to_target > 0 ? 1.0 / m.distance_to_target : 0.0;
  double levels_term = static_cast<double>(m.level) / m.max_levels;
  double succ_term = m.succ > 0 ? static_cast<double>(m.rel_succ) / m.succ : 0.0;
  double prob_term = m.domsucc > 0 ? 1.0 / m.domsucc : 1.0;
  double w = (distance_term + levels_term + succ_term + prob_term) / 4.0;
  return std::clamp(w, 1e-9, 1.0);
}

inline NodeMetrics node_metrics(const ProgramGraph& g, const DominatorTree& tree,
                                const std::string& node, const std::string& target) {
  NodeMetrics m;
  m.distance_to_target = shortest_distance(g, node, target);
  m.level = tree.depth.at(node);
  m.max_levels = tree.max_depth;
  m.succ = static_cast<int>(g.successors(node).size());
  m.rel_succ = relevant_successors(g, node, target);
  m.domsucc = static_cast<int>(tree.children.at(node).size());
  return m;
}

// A graph with its dominator tree, the unit weights are computed against.
struct GraphBundle {
  ProgramGraph* graph = nullptr;
  const DominatorTree* domtree = nullptr;
};

using GraphBundles = std::map<std::string, GraphBundle>;  // keyed by GraphKind tag

// Computes every element's weight within its own graph/domtree pair and
// mirrors the memberships and weights onto the graph nodes. Target-point
// elements are set to 1 without evaluating the formula. With
// `all_ones` the structural formula is bypassed and every member weighs 1
// (the ablation that reduces weighted matching to plain subsequence
// counting).
inline void annotate_graphs(std::vector<EnhancedTargetSequence>& etss, GraphBundles& bundles,
                            bool all_ones = false) {
  for (auto& ets : etss) {
    for (auto& e : ets.elements) {
      auto it = bundles.find(e.graph.tag());
      if (it == bundles.end())
        throw ValidationError("no graph registered for kind '" + e.graph.tag() + "'");
      ProgramGraph& g = *it->second.graph;
      const DominatorTree& tree = *it->second.domtree;

      if (e.kind == MembershipKind::TargetPoint || all_ones) {
        e.weight = 1.0;
      } else {
        const std::string& target =
            e.graph.call_graph ? ets.target_node_cg : ets.target_node_cfg;
        e.weight = context_weight(node_metrics(g, tree, e.node, target));
      }

      GraphNode* n = g.find_node(e.node);
      if (!n) throw ValidationError("sequence references unknown node '" + e.node + "'");
      n->ets_memberships[ets.ets_id] = e.kind;
      n->weights[ets.ets_id] = e.weight;
    }
  }
}

}  // namespace dirfuzz
