#pragma once

// Mock program model for desk-scale campaigns: blocks with byte-compare
// branches, static call lists, crash blocks, and target markers. An
// execution is a deterministic walk from the entry; the recorded trace
// contains only instrumentation-plan blocks, while edge coverage spans
// every block executed.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dirfuzz/errors.hpp"
#include "dirfuzz/ets.hpp"
#include "dirfuzz/toml.hpp"

namespace dirfuzz {

struct BranchCondition {
  enum class Cmp { Lt, Gt, Eq, Ne };
  int byte_index = 0;
  Cmp cmp = Cmp::Ne;
  int value = 0;  // compared against the addressed input byte; bytes past the end read as 0
  std::string true_succ;
  std::string false_succ;
};

struct MockBlock {
  std::string id;
  std::vector<std::string> calls;  // callee entry blocks, walked in order
  std::optional<BranchCondition> branch;
  bool crash = false;
};

struct MockProgram {
  std::string entry;
  int max_input_len = 64;
  std::vector<MockBlock> blocks;
  std::map<std::string, std::vector<int>> targets;  // block id -> target point ids

  // Filled by bind_plan.
  std::map<std::string, int> plan_ids;  // block id -> instrumentation plan id

  const MockBlock* find_block(std::string_view id) const {
    for (const auto& b : blocks)
      if (b.id == id) return &b;
    return nullptr;
  }

  int block_index(std::string_view id) const {
    for (size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i].id == id) return static_cast<int>(i);
    return -1;
  }

  void validate() const {
    std::set<std::string> ids;
    for (const auto& b : blocks)
      if (!ids.insert(b.id).second) throw ValidationError("duplicate block '" + b.id + "'");
    if (!ids.count(entry)) throw ValidationError("program entry '" + entry + "' does not exist");
    for (const auto& b : blocks) {
      for (const auto& c : b.calls)
        if (!ids.count(c))
          throw ValidationError("block '" + b.id + "' calls unknown block '" + c + "'");
      if (b.branch) {
        if (!ids.count(b.branch->true_succ) || !ids.count(b.branch->false_succ))
          throw ValidationError("block '" + b.id + "' branches to an unknown block");
        if (b.branch->byte_index < 0 || b.branch->byte_index >= max_input_len)
          throw ValidationError("block '" + b.id + "' tests a byte beyond the input bound");
      }
    }
    for (const auto& [block, tps] : targets)
      if (!ids.count(block))
        throw ValidationError("target " + std::to_string(tps.front()) + " marks unknown block '" +
                              block + "'");
  }

  std::set<int> all_target_ids() const {
    std::set<int> out;
    for (const auto& [block, tps] : targets) out.insert(tps.begin(), tps.end());
    return out;
  }

  // Connects the program to an instrumentation plan. Every plan entry
  // must exist as a block; plan node names must be unique since program
  // blocks live in one flat namespace.
  void bind_plan(const InstrumentationPlan& plan) {
    plan_ids.clear();
    std::vector<std::string> missing;
    for (const auto& e : plan.entries) {
      if (!find_block(e.node)) {
        missing.push_back(e.node);
        continue;
      }
      if (plan_ids.count(e.node))
        throw ValidationError("instrumentation plan names block '" + e.node +
                              "' more than once across graphs");
      plan_ids[e.node] = e.id;
    }
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      throw ValidationError("instrumentation plan blocks missing from program: " + list);
    }
  }
};

struct ExecResult {
  std::vector<int> trace;  // plan block ids in execution order, possibly capped
  bool truncated = false;
  bool crashed = false;
  std::set<int> reached_targets;
  std::vector<std::pair<int, int>> edges;  // (block index, block index); entry edge from -1
};

namespace detail {

inline bool eval_branch(const BranchCondition& br, const std::vector<uint8_t>& input) {
  int byte = br.byte_index < static_cast<int>(input.size()) ? input[br.byte_index] : 0;
  switch (br.cmp) {
    case BranchCondition::Cmp::Lt: return byte < br.value;
    case BranchCondition::Cmp::Gt: return byte > br.value;
    case BranchCondition::Cmp::Eq: return byte == br.value;
    case BranchCondition::Cmp::Ne: return byte != br.value;
  }
  return false;
}

struct ExecContext {
  const MockProgram* program;
  const std::vector<uint8_t>* input;
  ExecResult result;
  size_t trace_cap = 4096;
  int steps = 0;
  int last_block = -1;
  bool halted = false;

  static constexpr int kStepLimit = 1 << 16;
  static constexpr int kDepthLimit = 256;

  void visit(const MockBlock& b) {
    int idx = program->block_index(b.id);
    result.edges.emplace_back(last_block, idx);
    last_block = idx;
    if (auto it = program->plan_ids.find(b.id); it != program->plan_ids.end()) {
      if (result.trace.size() < trace_cap)
        result.trace.push_back(it->second);
      else
        result.truncated = true;
    }
    if (auto it = program->targets.find(b.id); it != program->targets.end())
      result.reached_targets.insert(it->second.begin(), it->second.end());
    if (b.crash) {
      result.crashed = true;
      halted = true;
    }
    if (++steps > kStepLimit) halted = true;
  }

  void walk(const std::string& start, int depth) {
    if (depth > kDepthLimit) {
      halted = true;
      return;
    }
    std::string cur = start;
    while (!halted) {
      const MockBlock* b = program->find_block(cur);
      visit(*b);
      if (halted) return;
      for (const auto& callee : b->calls) {
        walk(callee, depth + 1);
        if (halted) return;
      }
      if (!b->branch) return;
      cur = eval_branch(*b->branch, *input) ? b->branch->true_succ : b->branch->false_succ;
    }
  }
};

}  // namespace detail

inline ExecResult execute(const MockProgram& program, const std::vector<uint8_t>& input,
                          size_t trace_cap = 4096) {
  detail::ExecContext ctx;
  ctx.program = &program;
  ctx.input = &input;
  ctx.trace_cap = trace_cap;
  ctx.walk(program.entry, 0);
  return ctx.result;
}

inline MockProgram load_program(std::string_view text) {
  toml::Table root = toml::parse(text);
  if (auto schema = root.opt_string("schema"); schema && *schema != "dirfuzz-sim-v1")
    throw ValidationError("unsupported schema '" + *schema + "'");

  MockProgram p;
  p.entry = root.get_string("entry");
  p.max_input_len = static_cast<int>(root.opt_int("max_input_len").value_or(64));
  if (p.max_input_len <= 0) throw ValidationError("max_input_len must be positive");

  const auto* blocks = root.find_table_array("block");
  if (!blocks || blocks->empty()) throw ValidationError("program declares no blocks");
  for (const toml::Table& bt : *blocks) {
    MockBlock b;
    b.id = bt.get_string("id", "[[block]]");
    if (bt.contains("calls")) b.calls = bt.get_string_array("calls", "[[block]]");
    b.crash = bt.opt_bool("crash").value_or(false);
    if (auto succ = bt.opt_string("succ")) {
      // Unconditional jump: a branch whose arms agree.
      BranchCondition br;
      br.byte_index = 0;
      br.cmp = BranchCondition::Cmp::Ne;
      br.value = -1;
      br.true_succ = *succ;
      br.false_succ = *succ;
      b.branch = br;
    }
    if (const toml::Table* brt = bt.find_table("branch")) {
      if (b.branch)
        throw ValidationError("block '" + b.id + "' has both succ and branch");
      BranchCondition br;
      br.byte_index = static_cast<int>(brt->get_int("byte", "branch"));
      std::string cmp = brt->get_string("cmp", "branch");
      if (cmp == "lt")
        br.cmp = BranchCondition::Cmp::Lt;
      else if (cmp == "gt")
        br.cmp = BranchCondition::Cmp::Gt;
      else if (cmp == "eq")
        br.cmp = BranchCondition::Cmp::Eq;
      else if (cmp == "ne")
        br.cmp = BranchCondition::Cmp::Ne;
      else
        throw ValidationError("block '" + b.id + "': unknown comparator '" + cmp + "'");
      br.value = static_cast<int>(brt->get_int("value", "branch"));
      br.true_succ = brt->get_string("true_succ", "branch");
      br.false_succ = brt->get_string("false_succ", "branch");
      b.branch = br;
    }
    p.blocks.push_back(std::move(b));
  }

  if (const auto* targets = root.find_table_array("target")) {
    std::set<int> tp_ids;
    for (const toml::Table& tt : *targets) {
      int tp = static_cast<int>(tt.get_int("tp", "[[target]]"));
      std::string block = tt.get_string("block", "[[target]]");
      if (!tp_ids.insert(tp).second)
        throw ValidationError("duplicate target id " + std::to_string(tp));
      p.targets[block].push_back(tp);
    }
  }

  p.validate();
  return p;
}

}  // namespace dirfuzz
