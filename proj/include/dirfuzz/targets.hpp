#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dirfuzz/errors.hpp"
#include "dirfuzz/toml.hpp"

namespace dirfuzz {

struct TargetPoint {
  int tp_id = 0;
  std::string file;
  int line = 1;

  friend bool operator==(const TargetPoint&, const TargetPoint&) = default;
};

// Reads the target-point config: an array of [[target]] tables with
// `file` and `line` keys. Ids are assigned in declaration order from 0.
inline std::vector<TargetPoint> parse_targets(std::string_view text) {
  toml::Table root = toml::parse(text);
  const auto* targets = root.find_table_array("target");
  if (!targets || targets->empty())
    throw ValidationError("at least one target point required");

  std::vector<TargetPoint> out;
  std::set<std::pair<std::string, int>> seen;
  for (const toml::Table& t : *targets) {
    TargetPoint tp;
    tp.tp_id = static_cast<int>(out.size());
    tp.file = t.get_string("file", "[[target]]");
    int64_t line = t.get_int("line", "[[target]]");
    if (line <= 0)
      throw ValidationError("target " + std::to_string(tp.tp_id) + ": line must be positive");
    tp.line = static_cast<int>(line);
    if (!seen.insert({tp.file, tp.line}).second)
      throw ValidationError("duplicate target point " + tp.file + ":" + std::to_string(tp.line));
    out.push_back(std::move(tp));
  }
  return out;
}

}  // namespace dirfuzz
