#pragma once

#include <stdexcept>
#include <string>

namespace dirfuzz {

// Syntax-level failure in an input file (DOT, TOML, trace). Carries a
// 1-based line number when the format makes one available.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : std::move(message)),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Semantically invalid input: well-formed file, inconsistent content
// (arity mismatches, missing entry node, duplicate target points, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pipeline failure on valid inputs: a target point that cannot be mapped
// to a node, or one that is statically unreachable from the entry.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dirfuzz
