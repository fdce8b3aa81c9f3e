#pragma once

// Deterministic fuzzing campaign over a mock program. Corpus entries are
// scheduled round-robin; the annealed energy derived from each entry's
// compound factor decides how many mutants it spawns per round. A mutant
// joins the corpus when its trace was never seen before or it uncovered a
// new coverage-map edge.

#include <array>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dirfuzz/errors.hpp"
#include "dirfuzz/ets.hpp"
#include "dirfuzz/metrics.hpp"
#include "dirfuzz/schedule.hpp"
#include "dirfuzz/sim.hpp"

namespace dirfuzz {

// Prefix set of block-id sequences for exact whole-trace lookups.
class TraceTrie {
 public:
  // Inserts and reports whether the exact sequence was absent before.
  bool insert(const std::vector<int>& seq) {
    size_t cur = 0;
    for (int id : seq) {
      auto [it, added] = nodes_[cur].next.emplace(id, nodes_.size());
      if (added) nodes_.emplace_back();
      cur = it->second;
    }
    bool fresh = !nodes_[cur].terminal;
    nodes_[cur].terminal = true;
    return fresh;
  }

  bool contains(const std::vector<int>& seq) const {
    size_t cur = 0;
    for (int id : seq) {
      auto it = nodes_[cur].next.find(id);
      if (it == nodes_[cur].next.end()) return false;
      cur = it->second;
    }
    return nodes_[cur].terminal;
  }

 private:
  struct Node {
    std::map<int, size_t> next;
    bool terminal = false;
  };
  std::vector<Node> nodes_{1};
};

// AFL-style edge map: (block, next block) pairs hash into a fixed table;
// collisions fold distinct edges together and are tolerated.
class CoverageMap {
 public:
  static constexpr size_t kSlots = 65536;

  // Marks all edges of one execution; true when any slot lit up first.
  bool observe(const std::vector<std::pair<int, int>>& edges) {
    bool fresh = false;
    for (const auto& [from, to] : edges) {
      size_t slot = hash_edge(from, to);
      if (!map_[slot]) {
        map_[slot] = 1;
        fresh = true;
      }
    }
    return fresh;
  }

  size_t count() const {
    size_t n = 0;
    for (uint8_t b : map_) n += b;
    return n;
  }

 private:
  static size_t hash_edge(int from, int to) {
    uint64_t x = (static_cast<uint64_t>(static_cast<uint32_t>(from + 1)) << 32) |
                 static_cast<uint32_t>(to + 1);
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return static_cast<size_t>(x & (kSlots - 1));
  }

  std::array<uint8_t, kSlots> map_{};
};

struct CorpusEntry {
  std::vector<uint8_t> input;
  std::vector<int> trace;
  double cfw = 0.0;
  double capability_w = 0.0;
  int ots_id = -1;
};

struct CampaignEvent {
  uint64_t iter = 0;   // scheduling round; 0 covers seed-corpus processing
  uint64_t clock = 0;  // executions performed so far
  std::string kind;    // corpus-add | target-reached | crash | trace-truncated
  int tp_id = -1;
  std::string input_hex;
  std::optional<double> cfw;
};

struct CampaignState {
  std::vector<CorpusEntry> corpus;
  TraceTrie seen_traces;
  CoverageMap coverage;
  std::vector<double> gmax;
  uint64_t clock = 0;  // executions
  uint64_t round = 0;  // scheduling iterations
  uint64_t rng_seed = 0;
  std::vector<CampaignEvent> events;
  std::map<int, uint64_t> first_reach_round;  // tp id -> scheduling round
  size_t next_pick = 0;
};

struct CampaignConfig {
  ScheduleConfig schedule;
  uint64_t rng_seed = 1;
  std::vector<std::vector<uint8_t>> seeds;
  uint64_t budget_rounds = 1000;
  std::optional<uint64_t> budget_clock;  // optional execution budget
  size_t trace_cap = 4096;
};

inline bool is_novel(CampaignState& state, const std::vector<int>& trace, bool new_edges) {
  bool fresh = state.seen_traces.insert(trace);
  return fresh || new_edges;
}

inline int64_t schedule_energy(const CorpusEntry& entry, const CampaignState& state,
                               const CampaignConfig& cfg) {
  double temp = temperature(static_cast<double>(state.clock), cfg.schedule);
  return ets_energy(cfg.schedule.base_energy, capability_w(entry.cfw, temp));
}

// One structural mutation: whole-byte flip, interesting constant, +-1, or
// a truncate/extend, all bounded by max_len. Empty inputs can only grow.
inline std::vector<uint8_t> mutate(const std::vector<uint8_t>& input, std::mt19937_64& rng,
                                   int max_len) {
  static constexpr uint8_t kInteresting[] = {0, 1, 16, 32, 64, 100, 127, 128, 200, 201, 255};
  std::vector<uint8_t> out = input;

  auto rand_below = [&rng](uint64_t n) { return n ? rng() % n : 0; };
  auto interesting = [&]() { return kInteresting[rand_below(std::size(kInteresting))]; };

  int op = out.empty() ? 3 : static_cast<int>(rand_below(4));
  switch (op) {
    case 0: {
      size_t i = rand_below(out.size());
      out[i] ^= 0xFF;
      break;
    }
    case 1: {
      size_t i = rand_below(out.size());
      out[i] = interesting();
      break;
    }
    case 2: {
      size_t i = rand_below(out.size());
      out[i] = static_cast<uint8_t>(out[i] + (rand_below(2) ? 1 : -1));
      break;
    }
    default: {
      bool extend = out.empty() || (static_cast<int>(out.size()) < max_len && rand_below(2));
      if (extend && static_cast<int>(out.size()) < max_len)
        out.push_back(interesting());
      else if (!out.empty())
        out.pop_back();
      break;
    }
  }
  return out;
}

inline std::string to_hex(const std::vector<uint8_t>& bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xF];
  }
  return out;
}

inline std::vector<uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2) throw ValidationError("hex string has odd length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ValidationError("invalid hex digit");
  };
  std::vector<uint8_t> out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2)
    out.push_back(static_cast<uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
  return out;
}

namespace detail {

struct CampaignRunner {
  const MockProgram& program;
  const std::vector<WeightedSeq>& seqs;
  const std::vector<int>& ets_ids;
  const std::vector<int>& priorityw;
  const CampaignConfig& cfg;
  CampaignState& state;
  std::mt19937_64 rng;
  std::set<int> all_targets;

  CampaignRunner(const MockProgram& p, const std::vector<WeightedSeq>& s,
                 const std::vector<int>& ids, const std::vector<int>& prio,
                 const CampaignConfig& c, CampaignState& st)
      : program(p), seqs(s), ets_ids(ids), priorityw(prio), cfg(c), state(st),
        rng(c.rng_seed), all_targets(p.all_target_ids()) {}

  bool all_reached() const {
    for (int tp : all_targets)
      if (!state.first_reach_round.count(tp)) return false;
    return true;
  }

  bool over_budget() const {
    if (cfg.budget_clock && state.clock >= *cfg.budget_clock) return true;
    return false;
  }

  void evaluate(const std::vector<uint8_t>& input, uint64_t iter) {
    ExecResult res = execute(program, input, cfg.trace_cap);
    ++state.clock;

    bool new_edges = state.coverage.observe(res.edges);
    MetricsReport report = evaluate_trace(seqs, ets_ids, priorityw, res.trace, state.gmax);

    for (int tp : res.reached_targets) {
      if (state.first_reach_round.emplace(tp, iter).second)
        state.events.push_back({iter, state.clock, "target-reached", tp, {}, {}});
    }
    if (res.crashed)
      state.events.push_back({iter, state.clock, "crash", -1, to_hex(input), {}});
    if (res.truncated)
      state.events.push_back({iter, state.clock, "trace-truncated", -1, to_hex(input), {}});

    if (is_novel(state, res.trace, new_edges)) {
      CorpusEntry entry;
      entry.input = input;
      entry.trace = res.trace;
      entry.cfw = report.cfw;
      entry.capability_w =
          capability_w(report.cfw, temperature(static_cast<double>(state.clock), cfg.schedule));
      entry.ots_id = report.ots_id;
      state.corpus.push_back(entry);
      state.events.push_back({iter, state.clock, "corpus-add", -1, to_hex(input), report.cfw});
    }
  }

  void run() {
    for (const auto& seed : cfg.seeds) {
      evaluate(seed, 0);
      if (all_reached()) return;
    }
    while (state.round < cfg.budget_rounds && !all_reached() && !over_budget()) {
      ++state.round;
      if (state.corpus.empty()) break;
      // Copy: the corpus may grow while this entry's mutants run.
      CorpusEntry entry = state.corpus[state.next_pick % state.corpus.size()];
      ++state.next_pick;
      int64_t energy = schedule_energy(entry, state, cfg);
      for (int64_t k = 0; k < energy; ++k) {
        std::vector<uint8_t> child = mutate(entry.input, rng, program.max_input_len);
        evaluate(child, state.round);
        if (all_reached() || over_budget()) return;
      }
    }
  }
};

}  // namespace detail

inline CampaignState run_campaign(const MockProgram& program, const EtsFile& ets,
                                  const CampaignConfig& cfg) {
  cfg.schedule.validate();
  if (cfg.seeds.empty()) throw ValidationError("empty initial corpus");

  CampaignState state;
  state.rng_seed = cfg.rng_seed;
  state.gmax.assign(ets.sequences.size(), 0.0);
  if (cfg.budget_rounds == 0) return state;  // validated, nothing executed

  std::vector<WeightedSeq> seqs;
  std::vector<int> ids, prio;
  for (const auto& s : ets.sequences) {
    seqs.push_back(to_weighted_seq(s, ets.plan));
    ids.push_back(s.ets_id);
    prio.push_back(s.priorityw);
  }

  detail::CampaignRunner runner(program, seqs, ids, prio, cfg, state);
  runner.run();
  return state;
}

// Event log as JSON lines with a fixed field order.
inline std::string write_event_log(const std::vector<CampaignEvent>& events) {
  auto fmt_double = [](double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
  };
  std::string out;
  for (const auto& e : events) {
    out += "{\"iter\":" + std::to_string(e.iter) + ",\"clock\":" + std::to_string(e.clock) +
           ",\"kind\":\"" + e.kind + "\"";
    if (e.tp_id >= 0) out += ",\"tp_id\":" + std::to_string(e.tp_id);
    if (!e.input_hex.empty() || e.kind == "corpus-add" || e.kind == "crash")
      out += ",\"input_hex\":\"" + e.input_hex + "\"";
    if (e.cfw) out += ",\"cfw\":" + fmt_double(*e.cfw);
    out += "}\n";
  }
  return out;
}

// Replaces every sequence weight with 1, reducing weighted matching to
// plain common-subsequence counting.
inline void force_unit_weights(EtsFile& f) {
  for (auto& ets : f.sequences)
    for (auto& e : ets.elements) e.weight = 1.0;
}

}  // namespace dirfuzz
