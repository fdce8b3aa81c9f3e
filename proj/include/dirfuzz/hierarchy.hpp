#pragma once

// Indirect-call resolution from class-hierarchy information. Hierarchy
// trees are rooted at base classes (edge = direct derivation); a virtual
// call is resolved to every method with matching name and prototype owned
// by a class of any tree containing the call's base class. Calls through
// plain function pointers resolve by prototype alone. Resolved edges are
// added to the call graph with the indirect flag set.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dirfuzz/errors.hpp"
#include "dirfuzz/graph.hpp"
#include "dirfuzz/toml.hpp"

namespace dirfuzz {

struct MethodSig {
  std::string name;
  std::vector<std::string> prototype;  // parameter types then return type
  std::string owner;                   // empty for free functions
  std::string cg_node;

  friend bool operator==(const MethodSig&, const MethodSig&) = default;
};

struct ClassHierarchy {
  std::vector<std::string> classes;                          // declaration order
  std::vector<std::pair<std::string, std::string>> derives;  // (base, derived)
  std::vector<MethodSig> methods;                            // class methods and free functions

  bool has_class(std::string_view name) const {
    return std::find(classes.begin(), classes.end(), name) != classes.end();
  }
};

struct IndirectCallSite {
  enum class Kind { VirtualCall, FunctionPointer };
  std::string caller;  // call-graph node id
  Kind kind = Kind::FunctionPointer;
  std::string base_class;  // virtual calls only
  std::string callee_name;
  std::vector<std::string> prototype;
};

struct HierarchyTree {
  std::string root;
  std::vector<std::string> members;                        // root first, breadth-first
  std::vector<std::pair<std::string, std::string>> edges;  // direct derivation

  bool contains(std::string_view cls) const {
    return std::find(members.begin(), members.end(), cls) != members.end();
  }
};

namespace detail {

inline std::string normalize_type(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != ' ' && c != '\t') out += c;
  return out;
}

inline std::vector<std::string> normalize_prototype(const std::vector<std::string>& proto) {
  std::vector<std::string> out;
  out.reserve(proto.size());
  for (const auto& t : proto) out.push_back(normalize_type(t));
  return out;
}

inline bool prototypes_match(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
  return normalize_prototype(a) == normalize_prototype(b);
}

}  // namespace detail

// One tree per root base class (a class that derives from nothing),
// spanning everything reachable through derivation. A class with several
// bases shows up in each base's tree.
inline std::vector<HierarchyTree> build_hierarchy_trees(const ClassHierarchy& h) {
  std::map<std::string, std::vector<std::string>> derived_of;
  std::set<std::string> has_base;
  for (const auto& [base, derived] : h.derives) {
    if (!h.has_class(base)) throw ValidationError("derivation references unknown class '" + base + "'");
    if (!h.has_class(derived))
      throw ValidationError("derivation references unknown class '" + derived + "'");
    derived_of[base].push_back(derived);
    has_base.insert(derived);
  }

  // Cycle check over the derivation relation.
  std::map<std::string, int> state;  // 0 unseen, 1 in progress, 2 done
  std::vector<std::pair<std::string, size_t>> stack;
  for (const auto& cls : h.classes) {
    if (state[cls]) continue;
    stack.emplace_back(cls, 0);
    state[cls] = 1;
    while (!stack.empty()) {
      auto& [cur, idx] = stack.back();
      auto& next = derived_of[cur];
      if (idx < next.size()) {
        const std::string& d = next[idx++];
        if (state[d] == 1) throw ValidationError("class hierarchy contains a cycle at '" + d + "'");
        if (state[d] == 0) {
          state[d] = 1;
          stack.emplace_back(d, 0);
        }
      } else {
        state[cur] = 2;
        stack.pop_back();
      }
    }
  }

  std::vector<HierarchyTree> trees;
  for (const auto& cls : h.classes) {
    if (has_base.count(cls)) continue;  // not a root
    HierarchyTree tree;
    tree.root = cls;
    std::vector<std::string> queue{cls};
    std::set<std::string> seen{cls};
    while (!queue.empty()) {
      std::string cur = queue.front();
      queue.erase(queue.begin());
      tree.members.push_back(cur);
      for (const auto& d : derived_of[cur]) {
        tree.edges.emplace_back(cur, d);
        if (seen.insert(d).second) queue.push_back(d);
      }
    }
    trees.push_back(std::move(tree));
  }
  return trees;
}

struct ResolutionResult {
  ProgramGraph graph;
  std::vector<GraphEdge> added;          // indirect edges, sorted (caller, callee)
  std::vector<std::string> unresolved;   // warnings for sites with no candidates
};

inline ResolutionResult resolve_indirect_calls(const ProgramGraph& cg, const ClassHierarchy& h,
                                               const std::vector<IndirectCallSite>& sites) {
  std::vector<HierarchyTree> trees = build_hierarchy_trees(h);

  ResolutionResult result;
  result.graph = cg;

  std::set<std::pair<std::string, std::string>> new_edges;
  for (const auto& site : sites) {
    if (!cg.find_node(site.caller))
      throw ValidationError("indirect call site references unknown caller '" + site.caller + "'");

    std::vector<const MethodSig*> candidates;
    if (site.kind == IndirectCallSite::Kind::VirtualCall) {
      if (!h.has_class(site.base_class))
        throw ValidationError("indirect call in '" + site.caller + "': unknown base class '" +
                              site.base_class + "'");
      for (const auto& tree : trees) {
        if (!tree.contains(site.base_class)) continue;
        for (const auto& m : h.methods) {
          if (m.owner.empty() || !tree.contains(m.owner)) continue;
          if (m.name != site.callee_name) continue;
          if (!detail::prototypes_match(m.prototype, site.prototype)) continue;
          candidates.push_back(&m);
        }
      }
    } else {
      for (const auto& m : h.methods)
        if (detail::prototypes_match(m.prototype, site.prototype)) candidates.push_back(&m);
    }

    if (candidates.empty()) {
      result.unresolved.push_back(site.caller);
      continue;
    }
    for (const MethodSig* m : candidates) {
      if (!cg.find_node(m->cg_node))
        throw ValidationError("method '" + m->name + "' references unknown call-graph node '" +
                              m->cg_node + "'");
      if (cg.has_edge(site.caller, m->cg_node)) continue;  // already present in the input
      new_edges.insert({site.caller, m->cg_node});
    }
  }

  // Appending from the ordered set keeps the output independent of site
  // declaration order.
  for (const auto& [from, to] : new_edges) {
    result.graph.add_edge(from, to, /*indirect=*/true);
    result.added.push_back(result.graph.edges.back());
  }
  return result;
}

// Sidecar config: [[class]] name/bases, [[method]] class/name/prototype/
// cg_node (class omitted or empty for free functions), [[icall]] caller/
// kind/base_class/name/prototype.
struct HierarchyConfig {
  ClassHierarchy hierarchy;
  std::vector<IndirectCallSite> sites;
};

inline HierarchyConfig parse_hierarchy(std::string_view text) {
  toml::Table root = toml::parse(text);
  HierarchyConfig cfg;

  if (const auto* classes = root.find_table_array("class")) {
    for (const toml::Table& c : *classes) {
      std::string name = c.get_string("name", "[[class]]");
      if (cfg.hierarchy.has_class(name))
        throw ValidationError("duplicate class '" + name + "'");
      cfg.hierarchy.classes.push_back(name);
      if (c.contains("bases"))
        for (const auto& base : c.get_string_array("bases", "[[class]]"))
          cfg.hierarchy.derives.emplace_back(base, name);
    }
  }

  if (const auto* methods = root.find_table_array("method")) {
    for (const toml::Table& m : *methods) {
      MethodSig sig;
      sig.name = m.get_string("name", "[[method]]");
      sig.prototype = m.get_string_array("prototype", "[[method]]");
      sig.cg_node = m.get_string("cg_node", "[[method]]");
      if (auto owner = m.opt_string("class"); owner && !owner->empty()) {
        sig.owner = *owner;
        if (!cfg.hierarchy.has_class(sig.owner))
          throw ValidationError("method '" + sig.name + "' belongs to unknown class '" +
                                sig.owner + "'");
      }
      cfg.hierarchy.methods.push_back(std::move(sig));
    }
  }

  if (const auto* icalls = root.find_table_array("icall")) {
    for (const toml::Table& i : *icalls) {
      IndirectCallSite site;
      site.caller = i.get_string("caller", "[[icall]]");
      std::string kind = i.get_string("kind", "[[icall]]");
      if (kind == "virtual") {
        site.kind = IndirectCallSite::Kind::VirtualCall;
        site.base_class = i.get_string("base_class", "[[icall]]");
        site.callee_name = i.get_string("name", "[[icall]]");
      } else if (kind == "fnptr") {
        site.kind = IndirectCallSite::Kind::FunctionPointer;
      } else {
        throw ValidationError("icall kind must be \"virtual\" or \"fnptr\", got \"" + kind +
                              "\"");
      }
      site.prototype = i.get_string_array("prototype", "[[icall]]");
      cfg.sites.push_back(std::move(site));
    }
  }
  return cfg;
}

}  // namespace dirfuzz
