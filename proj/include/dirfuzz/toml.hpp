#pragma once

// Minimal TOML reader/writer covering the subset used by the toolkit's
// config files: bare keys, [table] and [[array-of-table]] headers with
// dotted paths, strings, integers, floats, booleans, and single-line
// arrays. Comments start with '#'. Not a general TOML implementation.

#include <charconv>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dirfuzz/errors.hpp"

namespace dirfuzz::toml {

class Value;
using Array = std::vector<Value>;

class Value {
 public:
  Value() : data_(int64_t{0}) {}
  Value(std::string v) : data_(std::move(v)) {}
  Value(const char* v) : data_(std::string(v)) {}
  Value(int64_t v) : data_(v) {}
  Value(int v) : data_(int64_t{v}) {}
  Value(double v) : data_(v) {}
  Value(bool v) : data_(v) {}
  Value(Array v) : data_(std::move(v)) {}

  bool is_string() const { return std::holds_alternative<std::string>(data_); }
  bool is_int() const { return std::holds_alternative<int64_t>(data_); }
  bool is_double() const { return std::holds_alternative<double>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_array() const { return std::holds_alternative<Array>(data_); }

  const std::string& as_string() const { return std::get<std::string>(data_); }
  int64_t as_int() const { return std::get<int64_t>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  const Array& as_array() const { return std::get<Array>(data_); }

  // Numeric accessor: integers widen to double.
  double as_double() const {
    if (is_int()) return static_cast<double>(as_int());
    return std::get<double>(data_);
  }

 private:
  std::variant<std::string, int64_t, double, bool, Array> data_;
};

// Insertion-ordered table. Order is preserved so that dump() output is
// deterministic and diffs stay readable.
class Table {
 public:
  using TableArray = std::vector<Table>;
  using Node = std::variant<Value, Table, TableArray>;

  bool contains(std::string_view key) const { return find_entry(key) != nullptr; }

  const Value* find_value(std::string_view key) const {
    auto* e = find_entry(key);
    return e && std::holds_alternative<Value>(e->node) ? &std::get<Value>(e->node) : nullptr;
  }
  const Table* find_table(std::string_view key) const {
    auto* e = find_entry(key);
    return e && std::holds_alternative<Table>(e->node) ? &std::get<Table>(e->node) : nullptr;
  }
  const TableArray* find_table_array(std::string_view key) const {
    auto* e = find_entry(key);
    return e && std::holds_alternative<TableArray>(e->node) ? &std::get<TableArray>(e->node)
                                                            : nullptr;
  }

  void set(std::string key, Value v) {
    if (auto* e = find_entry(key)) {
      e->node = std::move(v);
      return;
    }
    entries_.push_back({std::move(key), std::move(v)});
  }

  Table& open_table(std::string_view key) {
    if (auto* e = find_entry(key)) {
      if (!std::holds_alternative<Table>(e->node))
        throw ValidationError("key '" + std::string(key) + "' is not a table");
      return std::get<Table>(e->node);
    }
    entries_.push_back({std::string(key), Table{}});
    return std::get<Table>(entries_.back().node);
  }

  TableArray& open_table_array(std::string_view key) {
    if (auto* e = find_entry(key)) {
      if (!std::holds_alternative<TableArray>(e->node))
        throw ValidationError("key '" + std::string(key) + "' is not an array of tables");
      return std::get<TableArray>(e->node);
    }
    entries_.push_back({std::string(key), TableArray{}});
    return std::get<TableArray>(entries_.back().node);
  }

  // Typed getters. "context" names the enclosing structure in error text.
  const Value& require(std::string_view key, std::string_view context = {}) const {
    const Value* v = find_value(key);
    if (!v) throw ValidationError(where(context) + "missing key '" + std::string(key) + "'");
    return *v;
  }
  std::string get_string(std::string_view key, std::string_view context = {}) const {
    const Value& v = require(key, context);
    if (!v.is_string())
      throw ValidationError(where(context) + "key '" + std::string(key) + "' must be a string");
    return v.as_string();
  }
  int64_t get_int(std::string_view key, std::string_view context = {}) const {
    const Value& v = require(key, context);
    if (!v.is_int())
      throw ValidationError(where(context) + "key '" + std::string(key) + "' must be an integer");
    return v.as_int();
  }
  double get_double(std::string_view key, std::string_view context = {}) const {
    const Value& v = require(key, context);
    if (!v.is_int() && !v.is_double())
      throw ValidationError(where(context) + "key '" + std::string(key) + "' must be a number");
    return v.as_double();
  }
  bool get_bool(std::string_view key, std::string_view context = {}) const {
    const Value& v = require(key, context);
    if (!v.is_bool())
      throw ValidationError(where(context) + "key '" + std::string(key) + "' must be a boolean");
    return v.as_bool();
  }
  std::vector<std::string> get_string_array(std::string_view key,
                                            std::string_view context = {}) const {
    const Value& v = require(key, context);
    if (!v.is_array())
      throw ValidationError(where(context) + "key '" + std::string(key) + "' must be an array");
    std::vector<std::string> out;
    for (const Value& item : v.as_array()) {
      if (!item.is_string())
        throw ValidationError(where(context) + "array '" + std::string(key) +
                              "' must contain only strings");
      out.push_back(item.as_string());
    }
    return out;
  }

  std::optional<std::string> opt_string(std::string_view key) const {
    const Value* v = find_value(key);
    if (!v) return std::nullopt;
    if (!v->is_string())
      throw ValidationError("key '" + std::string(key) + "' must be a string");
    return v->as_string();
  }
  std::optional<int64_t> opt_int(std::string_view key) const {
    const Value* v = find_value(key);
    if (!v) return std::nullopt;
    if (!v->is_int())
      throw ValidationError("key '" + std::string(key) + "' must be an integer");
    return v->as_int();
  }
  std::optional<double> opt_double(std::string_view key) const {
    const Value* v = find_value(key);
    if (!v) return std::nullopt;
    if (!v->is_int() && !v->is_double())
      throw ValidationError("key '" + std::string(key) + "' must be a number");
    return v->as_double();
  }
  std::optional<bool> opt_bool(std::string_view key) const {
    const Value* v = find_value(key);
    if (!v) return std::nullopt;
    if (!v->is_bool())
      throw ValidationError("key '" + std::string(key) + "' must be a boolean");
    return v->as_bool();
  }

  struct Entry {
    std::string key;
    Node node;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  static std::string where(std::string_view context) {
    return context.empty() ? std::string{} : std::string(context) + ": ";
  }

  const Entry* find_entry(std::string_view key) const {
    for (const auto& e : entries_)
      if (e.key == key) return &e;
    return nullptr;
  }
  Entry* find_entry(std::string_view key) {
    for (auto& e : entries_)
      if (e.key == key) return &e;
    return nullptr;
  }

  std::vector<Entry> entries_;
};

namespace detail {

inline bool is_bare_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-';
}

// One physical line of input being scanned.
struct Cursor {
  std::string_view text;
  size_t pos = 0;
  int line = 0;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line); }
};

inline std::string parse_basic_string(Cursor& c) {
  // Opening quote already consumed by caller check; consume it here.
  ++c.pos;
  std::string out;
  while (true) {
    if (c.eof()) c.fail("unterminated string");
    char ch = c.text[c.pos++];
    if (ch == '"') return out;
    if (ch == '\\') {
      if (c.eof()) c.fail("unterminated escape");
      char esc = c.text[c.pos++];
      switch (esc) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: c.fail(std::string("unsupported escape '\\") + esc + "'");
      }
    } else {
      out += ch;
    }
  }
}

inline Value parse_value(Cursor& c);

inline Value parse_array(Cursor& c) {
  ++c.pos;  // '['
  Array items;
  while (true) {
    c.skip_ws();
    if (c.eof()) c.fail("unterminated array");
    if (c.peek() == ']') {
      ++c.pos;
      return Value(std::move(items));
    }
    items.push_back(parse_value(c));
    c.skip_ws();
    if (c.eof()) c.fail("unterminated array");
    if (c.peek() == ',') {
      ++c.pos;
      continue;
    }
    if (c.peek() == ']') {
      ++c.pos;
      return Value(std::move(items));
    }
    c.fail("expected ',' or ']' in array");
  }
}

inline Value parse_scalar(Cursor& c) {
  size_t start = c.pos;
  while (!c.eof()) {
    char ch = c.peek();
    if (ch == ',' || ch == ']' || ch == '#' || ch == ' ' || ch == '\t') break;
    ++c.pos;
  }
  std::string_view tok = c.text.substr(start, c.pos - start);
  if (tok.empty()) c.fail("expected a value");
  if (tok == "true") return Value(true);
  if (tok == "false") return Value(false);

  bool looks_float = tok.find('.') != std::string_view::npos ||
                     tok.find('e') != std::string_view::npos ||
                     tok.find('E') != std::string_view::npos;
  if (looks_float) {
    double d = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (ec != std::errc{} || p != tok.data() + tok.size()) c.fail("invalid float");
    return Value(d);
  }
  int64_t i = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), i);
  if (ec != std::errc{} || p != tok.data() + tok.size()) c.fail("invalid value");
  return Value(i);
}

inline Value parse_value(Cursor& c) {
  c.skip_ws();
  if (c.eof()) c.fail("expected a value");
  char ch = c.peek();
  if (ch == '"') return Value(parse_basic_string(c));
  if (ch == '[') return parse_array(c);
  return parse_scalar(c);
}

inline std::vector<std::string> split_path(std::string_view path, const Cursor& c) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : path) {
    if (ch == '.') {
      if (cur.empty()) c.fail("empty path segment in table header");
      parts.push_back(cur);
      cur.clear();
    } else if (is_bare_key_char(ch)) {
      cur += ch;
    } else {
      c.fail(std::string("invalid character '") + ch + "' in table header");
    }
  }
  if (cur.empty()) c.fail("empty path segment in table header");
  parts.push_back(cur);
  return parts;
}

// Walks down to the table addressed by all but the last path segment,
// descending into the last element of any array-of-tables on the way.
inline Table* navigate_prefix(Table& root, const std::vector<std::string>& path, const Cursor& c) {
  Table* cur = &root;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const std::string& key = path[i];
    if (auto* arr = cur->find_table_array(key)) {
      if (arr->empty()) c.fail("array of tables '" + key + "' has no elements");
      cur = const_cast<Table*>(&arr->back());
    } else {
      cur = &cur->open_table(key);
    }
  }
  return cur;
}

inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, p);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

inline std::string format_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += ch;
    }
  }
  out += '"';
  return out;
}

inline std::string format_value(const Value& v) {
  if (v.is_string()) return format_string(v.as_string());
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_double()) return format_double(v.as_double());
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  std::string out = "[";
  const Array& arr = v.as_array();
  for (size_t i = 0; i < arr.size(); ++i) {
    if (i) out += ", ";
    out += format_value(arr[i]);
  }
  out += "]";
  return out;
}

inline void dump_table(const Table& t, const std::string& path, std::string& out) {
  for (const auto& e : t.entries())
    if (std::holds_alternative<Value>(e.node))
      out += e.key + " = " + format_value(std::get<Value>(e.node)) + "\n";

  for (const auto& e : t.entries()) {
    std::string child_path = path.empty() ? e.key : path + "." + e.key;
    if (std::holds_alternative<Table>(e.node)) {
      out += "\n[" + child_path + "]\n";
      dump_table(std::get<Table>(e.node), child_path, out);
    } else if (std::holds_alternative<Table::TableArray>(e.node)) {
      for (const Table& elem : std::get<Table::TableArray>(e.node)) {
        out += "\n[[" + child_path + "]]\n";
        dump_table(elem, child_path, out);
      }
    }
  }
}

}  // namespace detail

inline Table parse(std::string_view text) {
  Table root;
  Table* current = &root;
  size_t line_start = 0;
  int line_no = 0;
  while (line_start <= text.size()) {
    size_t nl = text.find('\n', line_start);
    std::string_view raw =
        text.substr(line_start, nl == std::string_view::npos ? std::string_view::npos
                                                             : nl - line_start);
    ++line_no;
    line_start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    detail::Cursor c{raw, 0, line_no};
    c.skip_ws();
    if (c.eof() || c.peek() == '#') continue;

    if (c.peek() == '[') {
      bool is_array = c.pos + 1 < raw.size() && raw[c.pos + 1] == '[';
      size_t open = c.pos + (is_array ? 2 : 1);
      std::string_view close_tok = is_array ? "]]" : "]";
      size_t close = raw.find(close_tok, open);
      if (close == std::string_view::npos) c.fail("unterminated table header");
      std::string_view inner = raw.substr(open, close - open);
      // Trim inner whitespace.
      while (!inner.empty() && (inner.front() == ' ' || inner.front() == '\t'))
        inner.remove_prefix(1);
      while (!inner.empty() && (inner.back() == ' ' || inner.back() == '\t'))
        inner.remove_suffix(1);
      auto path = detail::split_path(inner, c);
      Table* parent = detail::navigate_prefix(root, path, c);
      if (is_array) {
        auto& arr = parent->open_table_array(path.back());
        arr.emplace_back();
        current = &arr.back();
      } else {
        current = &parent->open_table(path.back());
      }
      c.pos = close + close_tok.size();
      c.skip_ws();
      if (!c.eof() && c.peek() != '#') c.fail("unexpected text after table header");
      continue;
    }

    // key = value
    size_t key_start = c.pos;
    while (!c.eof() && detail::is_bare_key_char(c.peek())) ++c.pos;
    if (c.pos == key_start) c.fail("expected a key");
    std::string key(raw.substr(key_start, c.pos - key_start));
    c.skip_ws();
    if (c.eof() || c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
    ++c.pos;
    Value v = detail::parse_value(c);
    c.skip_ws();
    if (!c.eof() && c.peek() != '#') c.fail("unexpected text after value for key '" + key + "'");
    if (current->contains(key)) c.fail("duplicate key '" + key + "'");
    current->set(std::move(key), std::move(v));
  }
  return root;
}

inline std::string dump(const Table& root) {
  std::string out;
  detail::dump_table(root, "", out);
  return out;
}

}  // namespace dirfuzz::toml
