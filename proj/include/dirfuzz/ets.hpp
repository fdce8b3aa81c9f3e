#pragma once

// Target-point mapping and enhanced-target-sequence construction. Each
// target point yields one sequence: the dominator-tree ancestor chain of
// the target's function in the call graph, followed by the ancestor chain
// of the target's block in that function's CFG. The `ets.toml` file
// carries the sequences, their weights and priorities, and the flat
// instrumentation plan consumed by the metrics and simulation stages.

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dirfuzz/domtree.hpp"
#include "dirfuzz/errors.hpp"
#include "dirfuzz/graph.hpp"
#include "dirfuzz/targets.hpp"
#include "dirfuzz/toml.hpp"

namespace dirfuzz {

struct EtsElement {
  std::string node;
  GraphKind graph;
  MembershipKind kind = MembershipKind::Intermediate;
  double weight = 1.0;
  std::string file;
  int line = 0;

  friend bool operator==(const EtsElement&, const EtsElement&) = default;
};

struct EnhancedTargetSequence {
  int ets_id = 0;  // equals the target point id
  std::vector<EtsElement> elements;
  std::string target_node_cg;
  std::string target_node_cfg;
  std::string target_file;
  int target_line = 0;
  int priorityw = 0;

  std::vector<double> weights() const {
    std::vector<double> out;
    out.reserve(elements.size());
    for (const auto& e : elements) out.push_back(e.weight);
    return out;
  }
};

namespace detail {

// Exact path match, or a match on a whole-component suffix so that
// configs can say "main.c" against nodes annotated with absolute paths.
inline bool file_matches(std::string_view node_file, std::string_view tp_file) {
  if (node_file == tp_file) return true;
  auto suffix_of = [](std::string_view longer, std::string_view shorter) {
    return longer.size() > shorter.size() && longer.ends_with(shorter) &&
           longer[longer.size() - shorter.size() - 1] == '/';
  };
  return suffix_of(node_file, tp_file) || suffix_of(tp_file, node_file);
}

}  // namespace detail

// The unique call-graph node whose source range contains the target.
inline std::string map_target_to_cg(const ProgramGraph& cg, const TargetPoint& tp) {
  std::vector<const GraphNode*> hits;
  for (const auto& n : cg.nodes) {
    if (!n.location) continue;
    if (detail::file_matches(n.location->file, tp.file) && n.location->contains_line(tp.line))
      hits.push_back(&n);
  }
  if (hits.empty())
    throw AnalysisError("target " + std::to_string(tp.tp_id) + " unmappable: no function covers " +
                        tp.file + ":" + std::to_string(tp.line));
  if (hits.size() > 1)
    throw AnalysisError("target " + std::to_string(tp.tp_id) + " ambiguous: functions '" +
                        hits[0]->name() + "' and '" + hits[1]->name() + "' overlap at " +
                        tp.file + ":" + std::to_string(tp.line));
  return hits[0]->id;
}

// The block containing the target line, or failing that the block whose
// range boundary is nearest (ties broken toward the earlier block). The
// fallback covers lines without instructions: blank lines, prototypes.
inline std::string map_target_to_cfg(const ProgramGraph& cfg, const TargetPoint& tp) {
  if (cfg.nodes.empty()) throw AnalysisError("empty control-flow graph for target " +
                                             std::to_string(tp.tp_id));
  std::vector<const GraphNode*> hits;
  for (const auto& n : cfg.nodes) {
    if (!n.location) continue;
    if (n.location->contains_line(tp.line)) hits.push_back(&n);
  }
  if (hits.size() > 1)
    throw AnalysisError("target " + std::to_string(tp.tp_id) + " ambiguous: blocks '" +
                        hits[0]->id + "' and '" + hits[1]->id + "' overlap at line " +
                        std::to_string(tp.line));
  if (hits.size() == 1) return hits[0]->id;

  const GraphNode* best = nullptr;
  int best_distance = 0;
  for (const auto& n : cfg.nodes) {
    if (!n.location) continue;
    int d = std::min(std::abs(n.location->start_line - tp.line),
                     std::abs(n.location->end_line - tp.line));
    if (!best || d < best_distance ||
        (d == best_distance && n.location->start_line < best->location->start_line)) {
      best = &n;
      best_distance = d;
    }
  }
  if (!best) throw AnalysisError("control-flow graph carries no source locations");
  return best->id;
}

inline EnhancedTargetSequence build_ets(const DominatorTree& cg_domtree,
                                        const DominatorTree& cfg_domtree, const TargetPoint& tp,
                                        const std::string& cg_target,
                                        const std::string& cfg_target, const ProgramGraph& cg,
                                        const ProgramGraph& cfg) {
  if (!cg_domtree.contains(cg_target))
    throw AnalysisError("target " + std::to_string(tp.tp_id) + " statically unreachable: '" +
                        cg_target + "' has no path from the entry");
  if (!cfg_domtree.contains(cfg_target))
    throw AnalysisError("target " + std::to_string(tp.tp_id) + " statically unreachable: block '" +
                        cfg_target + "' has no path from the function entry");

  EnhancedTargetSequence ets;
  ets.ets_id = tp.tp_id;
  ets.target_node_cg = cg_target;
  ets.target_node_cfg = cfg_target;
  ets.target_file = tp.file;
  ets.target_line = tp.line;

  auto append = [&ets](const std::vector<std::string>& chain, const ProgramGraph& g,
                       const std::string& target) {
    for (const auto& id : chain) {
      EtsElement e;
      e.node = id;
      e.graph = g.kind;
      e.kind = id == target ? MembershipKind::TargetPoint : MembershipKind::Intermediate;
      if (const GraphNode* n = g.find_node(id); n && n->location) {
        e.file = n->location->file;
        e.line = n->location->start_line;
      }
      ets.elements.push_back(std::move(e));
    }
  };
  append(ancestors_to_root(cg_domtree, cg_target), cg, cg_target);
  append(ancestors_to_root(cfg_domtree, cfg_target), cfg, cfg_target);
  return ets;
}

struct PlanEntry {
  int id = 0;
  std::string node;
  GraphKind graph;
  std::string file;
  int line = 0;
};

// Flat list of every block that appears in at least one sequence, with
// stable integer ids assigned in first-appearance order.
struct InstrumentationPlan {
  std::vector<PlanEntry> entries;

  const PlanEntry* find(const GraphKind& graph, std::string_view node) const {
    for (const auto& e : entries)
      if (e.graph == graph && e.node == node) return &e;
    return nullptr;
  }
  const PlanEntry* find(int id) const {
    return id >= 0 && id < static_cast<int>(entries.size()) ? &entries[id] : nullptr;
  }
  int require_id(const GraphKind& graph, std::string_view node) const {
    const PlanEntry* e = find(graph, node);
    if (!e)
      throw ValidationError("block '" + std::string(node) + "' (" + graph.tag() +
                            ") is not in the instrumentation plan");
    return e->id;
  }
};

inline InstrumentationPlan build_plan(const std::vector<EnhancedTargetSequence>& etss) {
  InstrumentationPlan plan;
  for (const auto& ets : etss) {
    for (const auto& e : ets.elements) {
      if (plan.find(e.graph, e.node)) continue;
      plan.entries.push_back(
          {static_cast<int>(plan.entries.size()), e.node, e.graph, e.file, e.line});
    }
  }
  return plan;
}

struct EtsFile {
  std::vector<EnhancedTargetSequence> sequences;
  InstrumentationPlan plan;
};

inline std::string write_ets_file(const EtsFile& f) {
  toml::Table root;
  root.set("schema", "dirfuzz-ets-v1");

  auto& blocks = root.open_table_array("block");
  for (const auto& e : f.plan.entries) {
    toml::Table b;
    b.set("id", static_cast<int64_t>(e.id));
    b.set("node", e.node);
    b.set("graph", e.graph.tag());
    if (!e.file.empty()) {
      b.set("file", e.file);
      b.set("line", static_cast<int64_t>(e.line));
    }
    blocks.push_back(std::move(b));
  }

  auto& seqs = root.open_table_array("ets");
  for (const auto& ets : f.sequences) {
    toml::Table t;
    t.set("id", static_cast<int64_t>(ets.ets_id));
    t.set("priorityw", static_cast<int64_t>(ets.priorityw));
    t.set("cg_target", ets.target_node_cg);
    t.set("cfg_target", ets.target_node_cfg);
    t.set("target_file", ets.target_file);
    t.set("target_line", static_cast<int64_t>(ets.target_line));
    auto& elems = t.open_table_array("element");
    for (const auto& e : ets.elements) {
      toml::Table el;
      el.set("node", e.node);
      el.set("graph", e.graph.tag());
      el.set("kind", membership_name(e.kind));
      el.set("weight", e.weight);
      el.set("block", static_cast<int64_t>(f.plan.require_id(e.graph, e.node)));
      if (!e.file.empty()) {
        el.set("file", e.file);
        el.set("line", static_cast<int64_t>(e.line));
      }
      elems.push_back(std::move(el));
    }
    seqs.push_back(std::move(t));
  }
  return toml::dump(root);
}

inline EtsFile read_ets_file(std::string_view text) {
  toml::Table root = toml::parse(text);
  if (auto schema = root.opt_string("schema"); schema && *schema != "dirfuzz-ets-v1")
    throw ValidationError("unsupported schema '" + *schema + "'");

  EtsFile f;
  if (const auto* blocks = root.find_table_array("block")) {
    for (const toml::Table& b : *blocks) {
      PlanEntry e;
      e.id = static_cast<int>(b.get_int("id", "[[block]]"));
      e.node = b.get_string("node", "[[block]]");
      e.graph = GraphKind::from_tag(b.get_string("graph", "[[block]]"));
      if (auto file = b.opt_string("file")) {
        e.file = *file;
        e.line = static_cast<int>(b.opt_int("line").value_or(0));
      }
      if (e.id != static_cast<int>(f.plan.entries.size()))
        throw ValidationError("instrumentation plan ids must be dense and ordered, got " +
                              std::to_string(e.id));
      f.plan.entries.push_back(std::move(e));
    }
  }

  if (const auto* seqs = root.find_table_array("ets")) {
    for (const toml::Table& t : *seqs) {
      EnhancedTargetSequence ets;
      ets.ets_id = static_cast<int>(t.get_int("id", "[[ets]]"));
      ets.priorityw = static_cast<int>(t.get_int("priorityw", "[[ets]]"));
      ets.target_node_cg = t.get_string("cg_target", "[[ets]]");
      ets.target_node_cfg = t.get_string("cfg_target", "[[ets]]");
      ets.target_file = t.opt_string("target_file").value_or("");
      ets.target_line = static_cast<int>(t.opt_int("target_line").value_or(0));
      const auto* elems = t.find_table_array("element");
      if (!elems || elems->empty())
        throw ValidationError("sequence " + std::to_string(ets.ets_id) + " has no elements");
      for (const toml::Table& el : *elems) {
        EtsElement e;
        e.node = el.get_string("node", "[[ets.element]]");
        e.graph = GraphKind::from_tag(el.get_string("graph", "[[ets.element]]"));
        std::string kind = el.get_string("kind", "[[ets.element]]");
        if (kind == "point")
          e.kind = MembershipKind::TargetPoint;
        else if (kind == "member")
          e.kind = MembershipKind::Intermediate;
        else
          throw ValidationError("unknown element kind '" + kind + "'");
        e.weight = el.get_double("weight", "[[ets.element]]");
        if (!(e.weight > 0.0 && e.weight <= 1.0))
          throw ValidationError("element weight must lie in (0, 1]");
        int block = static_cast<int>(el.get_int("block", "[[ets.element]]"));
        const PlanEntry* pe = f.plan.find(block);
        if (!pe || pe->node != e.node || !(pe->graph == e.graph))
          throw ValidationError("element block id " + std::to_string(block) +
                                " does not match the instrumentation plan");
        if (auto file = el.opt_string("file")) {
          e.file = *file;
          e.line = static_cast<int>(el.opt_int("line").value_or(0));
        }
        ets.elements.push_back(std::move(e));
      }
      f.sequences.push_back(std::move(ets));
    }
  }
  return f;
}

}  // namespace dirfuzz
