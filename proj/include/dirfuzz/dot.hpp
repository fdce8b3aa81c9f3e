#pragma once

// Reader/writer for the annotated DOT dialect produced by the analysis
// pipeline. Nodes carry source locations (filename/startline/endline/
// startcolumn), labels, and the sequence annotations ts_kind/ts_numbers
// and w_val/w_numbers, where '/'-separated entries correspond
// positionally. Edges may carry an `indirect` flag. Anything else is kept
// verbatim so that parse/dump round-trips are lossless. Subgraphs, HTML
// labels and the other general GraphViz features are out of scope.

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "dirfuzz/errors.hpp"
#include "dirfuzz/graph.hpp"

namespace dirfuzz::dot {

struct ParseOptions {
  // Node whose name marks the call-graph entry.
  std::string cg_entry_label = "main";
};

namespace detail {

struct Token {
  enum Kind { Id, Punct, Arrow, End } kind = End;
  std::string text;
  int line = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_trivia();
    Token t;
    t.line = line_;
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      pos_ += 2;
      t.kind = Token::Arrow;
      t.text = "->";
      return t;
    }
    if (c == '{' || c == '}' || c == '[' || c == ']' || c == '=' || c == ',' || c == ';') {
      ++pos_;
      t.kind = Token::Punct;
      t.text = c;
      return t;
    }
    if (c == '"') {
      ++pos_;
      std::string out;
      while (true) {
        if (pos_ >= text_.size()) fail("unterminated string");
        char ch = text_[pos_++];
        if (ch == '"') break;
        if (ch == '\\' && pos_ < text_.size()) {
          char esc = text_[pos_++];
          if (esc == '"' || esc == '\\')
            out += esc;
          else {
            out += '\\';
            out += esc;
          }
        } else {
          if (ch == '\n') ++line_;
          out += ch;
        }
      }
      t.kind = Token::Id;
      t.text = std::move(out);
      return t;
    }
    if (is_id_char(c)) {
      size_t start = pos_;
      while (pos_ < text_.size() && is_id_char(text_[pos_])) ++pos_;
      t.kind = Token::Id;
      t.text = std::string(text_.substr(start, pos_ - start));
      return t;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  int line() const { return line_; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_); }

 private:
  // Bare identifiers are kept permissive; anything the canonical dumper
  // would quote still parses when unquoted in hand-written files.
  static bool is_id_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '.' || c == ':' || c == '-' || c == '+';
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        pos_ += 2;
        while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) {
          if (text_[pos_] == '\n') ++line_;
          ++pos_;
        }
        if (pos_ + 1 >= text_.size()) fail("unterminated comment");
        pos_ += 2;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
};

inline int parse_int_attr(const std::string& key, const std::string& value, int line) {
  int out = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || p != value.data() + value.size())
    throw ParseError("attribute '" + key + "' expects an integer, got '" + value + "'", line);
  return out;
}

inline std::vector<std::string> split_slashes(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '/') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline bool parse_flag(const std::string& value) {
  return value.empty() || value == "true" || value == "1";
}

// Raw attribute lists collected per statement before interpretation.
using AttrList = std::vector<std::pair<std::string, std::string>>;

inline AttrList parse_attr_list(Lexer& lex, Token& tok) {
  AttrList attrs;
  tok = lex.next();  // consume '['
  while (true) {
    if (tok.kind == Token::Punct && tok.text == "]") break;
    if (tok.kind != Token::Id) lex.fail("expected attribute name");
    std::string key = tok.text;
    tok = lex.next();
    std::string value;  // bare attribute (e.g. `indirect`) keeps an empty value
    if (tok.kind == Token::Punct && tok.text == "=") {
      tok = lex.next();
      if (tok.kind != Token::Id) lex.fail("expected attribute value for '" + key + "'");
      value = tok.text;
      tok = lex.next();
    }
    attrs.emplace_back(std::move(key), std::move(value));
    while (tok.kind == Token::Punct && (tok.text == "," || tok.text == ";")) tok = lex.next();
  }
  return attrs;
}

inline void apply_node_attrs(GraphNode& node, const AttrList& attrs, int line) {
  std::vector<std::string> ts_kind, ts_numbers, w_val, w_numbers;
  bool saw_ts_kind = false, saw_ts_numbers = false, saw_w_val = false, saw_w_numbers = false;
  SourceLocation loc;
  bool has_file = false, has_start = false, has_end = false;

  for (const auto& [key, value] : attrs) {
    if (key == "filename") {
      loc.file = value;
      has_file = true;
    } else if (key == "startline") {
      loc.start_line = parse_int_attr(key, value, line);
      has_start = true;
    } else if (key == "endline") {
      loc.end_line = parse_int_attr(key, value, line);
      has_end = true;
    } else if (key == "startcolumn") {
      loc.start_column = parse_int_attr(key, value, line);
    } else if (key == "label") {
      node.label = value;
    } else if (key == "ts_kind") {
      ts_kind = split_slashes(value);
      saw_ts_kind = true;
    } else if (key == "ts_numbers") {
      ts_numbers = split_slashes(value);
      saw_ts_numbers = true;
    } else if (key == "w_val") {
      w_val = split_slashes(value);
      saw_w_val = true;
    } else if (key == "w_numbers") {
      w_numbers = split_slashes(value);
      saw_w_numbers = true;
    } else {
      node.extra_attrs.emplace_back(key, value);
    }
  }

  if (has_file || has_start || has_end) {
    if (!has_end && has_start) loc.end_line = loc.start_line;
    if (!has_start)
      throw ValidationError("node '" + node.id + "' has location attributes but no startline");
    node.location = loc;
  }

  if (saw_ts_kind != saw_ts_numbers)
    throw ValidationError("node '" + node.id + "': ts_kind and ts_numbers must appear together");
  if (saw_w_val != saw_w_numbers)
    throw ValidationError("node '" + node.id + "': w_val and w_numbers must appear together");
  if (saw_ts_kind && ts_kind.size() != ts_numbers.size())
    throw ValidationError("node '" + node.id + "': ts_kind and ts_numbers arity mismatch");
  if (saw_w_val && w_val.size() != w_numbers.size())
    throw ValidationError("node '" + node.id + "': w_val and w_numbers arity mismatch");

  for (size_t i = 0; i < ts_kind.size(); ++i) {
    int ets_id = parse_int_attr("ts_numbers", ts_numbers[i], line);
    MembershipKind kind;
    if (ts_kind[i] == "point")
      kind = MembershipKind::TargetPoint;
    else if (ts_kind[i] == "member")
      kind = MembershipKind::Intermediate;
    else
      throw ValidationError("node '" + node.id + "': unknown ts_kind '" + ts_kind[i] + "'");
    node.ets_memberships[ets_id] = kind;
  }
  for (size_t i = 0; i < w_val.size(); ++i) {
    int ets_id = parse_int_attr("w_numbers", w_numbers[i], line);
    double w = 0;
    auto [p, ec] = std::from_chars(w_val[i].data(), w_val[i].data() + w_val[i].size(), w);
    if (ec != std::errc{} || p != w_val[i].data() + w_val[i].size())
      throw ValidationError("node '" + node.id + "': w_val entry '" + w_val[i] +
                            "' is not a number");
    node.weights[ets_id] = w;
  }
}

inline bool needs_quoting(const std::string& s) {
  if (s.empty()) return true;
  bool alpha = (s[0] >= 'a' && s[0] <= 'z') || (s[0] >= 'A' && s[0] <= 'Z') || s[0] == '_';
  if (alpha) {
    for (char c : s)
      if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
            c == '_'))
        return true;
    return false;
  }
  for (char c : s)
    if (c < '0' || c > '9') return true;
  return false;  // plain number
}

inline std::string quote(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_weight(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

}  // namespace detail

inline ProgramGraph parse(std::string_view text, GraphKind kind, const ParseOptions& opts = {}) {
  detail::Lexer lex(text);
  ProgramGraph g;
  g.kind = kind;

  detail::Token tok = lex.next();
  if (tok.kind == detail::Token::Id && tok.text == "strict") tok = lex.next();
  if (tok.kind != detail::Token::Id || tok.text != "digraph") lex.fail("expected 'digraph'");
  tok = lex.next();
  if (tok.kind == detail::Token::Id) {
    g.name = tok.text;
    tok = lex.next();
  }
  if (tok.kind != detail::Token::Punct || tok.text != "{") lex.fail("expected '{'");

  tok = lex.next();
  while (!(tok.kind == detail::Token::Punct && tok.text == "}")) {
    if (tok.kind == detail::Token::End) lex.fail("unexpected end of input, missing '}'");
    if (tok.kind != detail::Token::Id) lex.fail("expected a node id or attribute name");
    std::string first = tok.text;
    int stmt_line = tok.line;
    tok = lex.next();

    if (tok.kind == detail::Token::Punct && tok.text == "=") {
      // Graph-level attribute.
      tok = lex.next();
      if (tok.kind != detail::Token::Id) lex.fail("expected a value for graph attribute");
      g.graph_attrs.emplace_back(first, tok.text);
      tok = lex.next();
    } else if (tok.kind == detail::Token::Arrow) {
      tok = lex.next();
      if (tok.kind != detail::Token::Id) lex.fail("expected an edge target");
      GraphEdge e;
      e.from = first;
      e.to = tok.text;
      tok = lex.next();
      if (tok.kind == detail::Token::Punct && tok.text == "[") {
        for (auto& [key, value] : detail::parse_attr_list(lex, tok)) {
          if (key == "indirect")
            e.indirect = detail::parse_flag(value);
          else
            e.extra_attrs.emplace_back(std::move(key), std::move(value));
        }
        tok = lex.next();
      }
      g.edges.push_back(std::move(e));
    } else {
      GraphNode node;
      node.id = first;
      if (tok.kind == detail::Token::Punct && tok.text == "[") {
        auto attrs = detail::parse_attr_list(lex, tok);
        detail::apply_node_attrs(node, attrs, stmt_line);
        tok = lex.next();
      }
      if (g.find_node(node.id)) throw ParseError("duplicate node '" + node.id + "'", stmt_line);
      g.nodes.push_back(std::move(node));
    }
    while (tok.kind == detail::Token::Punct && tok.text == ";") tok = lex.next();
  }

  // Edges may reference nodes that were never declared with attributes.
  for (const auto& e : g.edges) {
    for (const std::string* id : {&e.from, &e.to})
      if (!g.find_node(*id)) g.nodes.push_back(GraphNode{.id = *id});
  }

  // Entry resolution: call graphs root at the node named like the main
  // function; CFGs use an `entry` graph attribute or the unique node
  // without predecessors.
  if (kind.call_graph) {
    for (const auto& n : g.nodes)
      if (n.name() == opts.cg_entry_label) {
        g.entry = n.id;
        break;
      }
  } else {
    for (const auto& [key, value] : g.graph_attrs)
      if (key == "entry") g.entry = value;
    if (g.entry.empty()) {
      std::vector<std::string> roots;
      for (const auto& n : g.nodes)
        if (g.predecessors(n.id).empty()) roots.push_back(n.id);
      if (roots.size() == 1) g.entry = roots[0];
    }
  }
  g.validate();
  return g;
}

inline std::string dump(const ProgramGraph& g) {
  std::string out = "digraph " + detail::quote(g.name.empty() ? "G" : g.name) + " {\n";
  for (const auto& [key, value] : g.graph_attrs)
    out += "    " + key + "=" + detail::quote(value) + ";\n";

  for (const auto& n : g.nodes) {
    out += "    " + detail::quote(n.id);
    std::vector<std::pair<std::string, std::string>> attrs;
    if (n.location) {
      attrs.emplace_back("filename", detail::quote(n.location->file));
      attrs.emplace_back("startline", std::to_string(n.location->start_line));
      attrs.emplace_back("endline", std::to_string(n.location->end_line));
      if (n.location->start_column)
        attrs.emplace_back("startcolumn", std::to_string(*n.location->start_column));
    }
    if (!n.label.empty()) attrs.emplace_back("label", detail::quote(n.label));
    if (!n.ets_memberships.empty()) {
      std::string kinds, numbers;
      for (const auto& [ets_id, kind] : n.ets_memberships) {
        if (!kinds.empty()) {
          kinds += '/';
          numbers += '/';
        }
        kinds += membership_name(kind);
        numbers += std::to_string(ets_id);
      }
      attrs.emplace_back("ts_kind", "\"" + kinds + "\"");
      attrs.emplace_back("ts_numbers", "\"" + numbers + "\"");
    }
    if (!n.weights.empty()) {
      std::string vals, numbers;
      for (const auto& [ets_id, w] : n.weights) {
        if (!vals.empty()) {
          vals += '/';
          numbers += '/';
        }
        vals += detail::format_weight(w);
        numbers += std::to_string(ets_id);
      }
      attrs.emplace_back("w_val", "\"" + vals + "\"");
      attrs.emplace_back("w_numbers", "\"" + numbers + "\"");
    }
    for (const auto& [key, value] : n.extra_attrs)
      attrs.emplace_back(key, detail::quote(value));

    if (!attrs.empty()) {
      out += " [";
      for (size_t i = 0; i < attrs.size(); ++i) {
        if (i) out += ", ";
        out += attrs[i].first + "=" + attrs[i].second;
      }
      out += "]";
    }
    out += ";\n";
  }

  for (const auto& e : g.edges) {
    out += "    " + detail::quote(e.from) + " -> " + detail::quote(e.to);
    std::vector<std::pair<std::string, std::string>> attrs;
    if (e.indirect) attrs.emplace_back("indirect", "true");
    for (const auto& [key, value] : e.extra_attrs) attrs.emplace_back(key, detail::quote(value));
    if (!attrs.empty()) {
      out += " [";
      for (size_t i = 0; i < attrs.size(); ++i) {
        if (i) out += ", ";
        out += attrs[i].first + "=" + attrs[i].second;
      }
      out += "]";
    }
    out += ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace dirfuzz::dot

namespace dirfuzz {
// Operation-style aliases.
inline ProgramGraph parse_dot(std::string_view text, GraphKind kind,
                              const dot::ParseOptions& opts = {}) {
  return dot::parse(text, kind, opts);
}
inline std::string dump_dot(const ProgramGraph& g) { return dot::dump(g); }
}  // namespace dirfuzz
