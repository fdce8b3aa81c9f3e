#pragma once

// End-to-end static stage: call-graph ingestion, optional indirect-call
// resolution, target mapping, dominator trees, sequence construction,
// context weights, and priorities. The file-level driver reads a graph
// directory (cg.dot plus cfg_<function>.dot for every target function)
// and writes ets.toml together with annotated graph and domtree dumps.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dirfuzz/domtree.hpp"
#include "dirfuzz/dot.hpp"
#include "dirfuzz/errors.hpp"
#include "dirfuzz/ets.hpp"
#include "dirfuzz/graph.hpp"
#include "dirfuzz/hierarchy.hpp"
#include "dirfuzz/metrics.hpp"
#include "dirfuzz/targets.hpp"
#include "dirfuzz/weights.hpp"

namespace dirfuzz {

struct AnalysisInputs {
  ProgramGraph cg;
  std::map<std::string, ProgramGraph> cfgs;  // keyed by function name
  std::vector<TargetPoint> targets;
  std::optional<HierarchyConfig> hierarchy;
  bool resolve_icalls = false;
  bool weights_on = true;
  // Drop statically unreachable targets instead of failing; used by
  // ablation experiments. Unmappable targets always fail.
  bool skip_unreachable = false;
};

struct TargetOutcome {
  TargetPoint tp;
  std::string cg_node;
  std::string cfg_node;
  bool skipped = false;
  std::string skip_reason;
};

struct AnalysisResult {
  ProgramGraph cg;
  std::map<std::string, ProgramGraph> cfgs;  // only the CFGs the targets needed
  DominatorTree cg_domtree;
  std::map<std::string, DominatorTree> cfg_domtrees;
  std::vector<EnhancedTargetSequence> sequences;
  InstrumentationPlan plan;
  std::vector<TargetOutcome> outcomes;
  std::vector<GraphEdge> resolved_edges;
  std::vector<std::string> unresolved_sites;

  EtsFile ets_file() const { return {sequences, plan}; }
};

inline AnalysisResult run_analysis(const AnalysisInputs& inputs) {
  if (inputs.targets.empty()) throw ValidationError("at least one target point required");

  AnalysisResult result;
  result.cg = inputs.cg;

  if (inputs.resolve_icalls && inputs.hierarchy) {
    ResolutionResult res =
        resolve_indirect_calls(result.cg, inputs.hierarchy->hierarchy, inputs.hierarchy->sites);
    result.cg = std::move(res.graph);
    result.resolved_edges = std::move(res.added);
    result.unresolved_sites = std::move(res.unresolved);
  }

  result.cg_domtree = compute_domtree(result.cg);

  for (const TargetPoint& tp : inputs.targets) {
    TargetOutcome outcome;
    outcome.tp = tp;
    outcome.cg_node = map_target_to_cg(result.cg, tp);

    std::string fn = result.cg.node_at(outcome.cg_node).name();
    auto cfg_it = inputs.cfgs.find(fn);
    if (cfg_it == inputs.cfgs.end())
      throw ValidationError("target " + std::to_string(tp.tp_id) +
                            ": no control-flow graph supplied for function '" + fn + "'");
    if (!result.cfgs.count(fn)) {
      result.cfgs.emplace(fn, cfg_it->second);
      result.cfg_domtrees.emplace(fn, compute_domtree(cfg_it->second));
    }
    const ProgramGraph& cfg = result.cfgs.at(fn);
    const DominatorTree& cfg_domtree = result.cfg_domtrees.at(fn);
    outcome.cfg_node = map_target_to_cfg(cfg, tp);

    try {
      result.sequences.push_back(build_ets(result.cg_domtree, cfg_domtree, tp, outcome.cg_node,
                                           outcome.cfg_node, result.cg, cfg));
    } catch (const AnalysisError& e) {
      if (!inputs.skip_unreachable) throw;
      outcome.skipped = true;
      outcome.skip_reason = e.what();
    }
    result.outcomes.push_back(std::move(outcome));
  }

  GraphBundles bundles;
  bundles["cg"] = {&result.cg, &result.cg_domtree};
  for (auto& [fn, cfg] : result.cfgs)
    bundles[cfg.kind.tag()] = {&cfg, &result.cfg_domtrees.at(fn)};
  annotate_graphs(result.sequences, bundles, /*all_ones=*/!inputs.weights_on);

  result.plan = build_plan(result.sequences);
  // Call-graph members map to the entry block of their function when that
  // CFG was built; the plan reports that block's location.
  for (auto& e : result.plan.entries) {
    if (!e.graph.call_graph) continue;
    std::string fn = result.cg.node_at(e.node).name();
    auto it = result.cfgs.find(fn);
    if (it == result.cfgs.end()) continue;
    const GraphNode* entry = it->second.find_node(it->second.entry);
    if (entry && entry->location) {
      e.file = entry->location->file;
      e.line = entry->location->start_line;
    }
  }

  std::vector<WeightedSeq> seqs;
  std::vector<int> ids;
  for (const auto& s : result.sequences) {
    seqs.push_back(to_weighted_seq(s, result.plan));
    ids.push_back(s.ets_id);
  }
  std::vector<int> prio = priorityw_all(seqs);
  for (size_t i = 0; i < prio.size(); ++i) result.sequences[i].priorityw = prio[i];

  return result;
}

namespace io {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  out << content;
}

// cfg_<function>.dot with path-hostile characters mapped to '_'.
inline std::string cfg_file_name(std::string_view function) {
  std::string safe;
  for (char c : function)
    safe += ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) ? c
                                                                                         : '_';
  return "cfg_" + safe + ".dot";
}

}  // namespace io

struct AnalyzeConfig {
  std::filesystem::path graph_dir;
  std::filesystem::path targets_path;
  std::optional<std::filesystem::path> hierarchy_path;
  std::filesystem::path out_dir;
  bool resolve_icalls = false;
  bool weights_on = true;
  std::string cg_entry_label = "main";
};

// File-level analyze: loads inputs, runs the pipeline, writes ets.toml
// plus annotated graph and dominator-tree DOT files into out_dir.
inline AnalysisResult run_analyze_files(const AnalyzeConfig& cfg) {
  AnalysisInputs inputs;
  dot::ParseOptions opts{cfg.cg_entry_label};
  inputs.cg = dot::parse(io::read_file(cfg.graph_dir / "cg.dot"), GraphKind::cg(), opts);
  inputs.targets = parse_targets(io::read_file(cfg.targets_path));
  if (cfg.hierarchy_path)
    inputs.hierarchy = parse_hierarchy(io::read_file(*cfg.hierarchy_path));
  inputs.resolve_icalls = cfg.resolve_icalls;
  inputs.weights_on = cfg.weights_on;

  // Load the CFG of every function that could host a target; extra CFG
  // files in the directory are ignored.
  ProgramGraph resolved = inputs.cg;
  if (cfg.resolve_icalls && inputs.hierarchy)
    resolved = resolve_indirect_calls(resolved, inputs.hierarchy->hierarchy,
                                      inputs.hierarchy->sites)
                   .graph;
  for (const TargetPoint& tp : inputs.targets) {
    std::string node = map_target_to_cg(resolved, tp);
    std::string fn = resolved.node_at(node).name();
    if (inputs.cfgs.count(fn)) continue;
    std::filesystem::path path = cfg.graph_dir / io::cfg_file_name(fn);
    if (!std::filesystem::exists(path))
      throw ValidationError("missing control-flow graph file: " + path.string());
    inputs.cfgs.emplace(fn, dot::parse(io::read_file(path), GraphKind::cfg(fn)));
  }

  AnalysisResult result = run_analysis(inputs);

  std::filesystem::create_directories(cfg.out_dir);
  io::write_file(cfg.out_dir / "ets.toml", write_ets_file(result.ets_file()));
  io::write_file(cfg.out_dir / "cg.dot", dot::dump(result.cg));
  io::write_file(cfg.out_dir / "domtree_cg.dot",
                 dot::dump(domtree_to_graph(result.cg_domtree, result.cg)));
  for (const auto& [fn, g] : result.cfgs) {
    io::write_file(cfg.out_dir / io::cfg_file_name(fn), dot::dump(g));
    io::write_file(cfg.out_dir / ("domtree_" + io::cfg_file_name(fn)),
                   dot::dump(domtree_to_graph(result.cfg_domtrees.at(fn), g)));
  }
  return result;
}

}  // namespace dirfuzz
