// Copyright 2026 The hsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HSCHED_GRAPH_IO_HPP_
#define HSCHED_GRAPH_IO_HPP_

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hsched/common.hpp"
#include "hsched/graph.hpp"

namespace hsched {

enum class GraphFormat { kJson, kDot, kEdgeList };

// ---------------------------------------------------------------------------
// JSON: {"nodes": N, "edges": [[src, dst, weight, diff_const], ...],
//        "labels": [...]?}
// Edge entries may have 2, 3 or 4 elements; weight defaults to 1, the
// difference constant to 0.
// ---------------------------------------------------------------------------

inline Dag parse_graph_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(std::string("json: ") + err.what());
  }
  if (!doc.is_object() || !doc.contains("nodes")) {
    throw ParseError("json: top level must be an object with a 'nodes' field");
  }
  if (!doc["nodes"].is_number_integer()) {
    throw ParseError("json: 'nodes' must be an integer");
  }
  int n = doc["nodes"].get<int>();
  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw ParseError("json: 'edges' must be an array");
    const auto& arr = doc["edges"];
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const auto& entry = arr[k];
      std::string where = "json: edges[" + std::to_string(k) + "]";
      if (!entry.is_array() || entry.size() < 2 || entry.size() > 4) {
        throw ParseError(where + ": expected [src, dst, weight?, diff_const?]");
      }
      for (const auto& field : entry) {
        if (!field.is_number()) throw ParseError(where + ": non-numeric field");
      }
      Edge e;
      e.src = entry[0].get<int>();
      e.dst = entry[1].get<int>();
      e.weight = entry.size() > 2 ? entry[2].get<double>() : 1.0;
      e.diff_const = entry.size() > 3 ? entry[3].get<int>() : 0;
      if (e.weight < 0) throw ParseError(where + ": negative weight");
      edges.push_back(e);
    }
  }
  std::vector<std::string> labels;
  if (doc.contains("labels")) {
    if (!doc["labels"].is_array()) throw ParseError("json: 'labels' must be an array");
    for (const auto& l : doc["labels"]) labels.push_back(l.get<std::string>());
  }
  return Dag(n, std::move(edges), std::move(labels));
}

// ---------------------------------------------------------------------------
// DOT subset: digraph [name] { a -> b [weight=1.5, c=0]; d; }
// Chains (a -> b -> c) expand edge-wise and share the attribute list.
// Unlisted attributes default to weight=1, c=0; unknown attribute keys are
// ignored. Node ids are assigned in order of first appearance and the names
// become labels.
// ---------------------------------------------------------------------------

namespace detail {

struct DotToken {
  enum Kind { kId, kSym, kArrow, kEnd } kind = kEnd;
  std::string text;
  int line = 0;
  int col = 0;
};

class DotLexer {
 public:
  explicit DotLexer(std::string_view text) : text_(text) {}

  DotToken next() {
    skip_ws_and_comments();
    DotToken tok;
    tok.line = line_;
    tok.col = col_;
    if (pos_ >= text_.size()) return tok;  // kEnd
    char c = text_[pos_];
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      advance(2);
      tok.kind = DotToken::kArrow;
      tok.text = "->";
      return tok;
    }
    if (std::string("{}[]=,;").find(c) != std::string::npos) {
      advance(1);
      tok.kind = DotToken::kSym;
      tok.text = std::string(1, c);
      return tok;
    }
    if (c == '"') {
      advance(1);
      std::string s;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        s += text_[pos_];
        advance(1);
      }
      if (pos_ >= text_.size()) throw err("unterminated string literal");
      advance(1);
      tok.kind = DotToken::kId;
      tok.text = s;
      return tok;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
        c == '-' || c == '+') {
      std::string s;
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        if (d == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          break;  // start of an arrow, not part of the name
        }
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' ||
            d == '.' || d == '-' || d == '+') {
          s += d;
          advance(1);
        } else {
          break;
        }
      }
      tok.kind = DotToken::kId;
      tok.text = s;
      return tok;
    }
    throw err(std::string("unexpected character '") + c + "'");
  }

  ParseError err(const std::string& what) const {
    return ParseError("dot:" + std::to_string(line_) + ":" +
                      std::to_string(col_) + ": " + what);
  }

 private:
  void advance(int k) {
    for (int i = 0; i < k && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_ws_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else if (c == '#' ||
                 (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/')) {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace detail

inline Dag parse_graph_dot(std::string_view text) {
  detail::DotLexer lex(text);
  auto expect = [&](const std::string& what) {
    detail::DotToken t = lex.next();
    if (t.kind == detail::DotToken::kEnd || t.text != what) {
      throw ParseError("dot:" + std::to_string(t.line) + ":" +
                       std::to_string(t.col) + ": expected '" + what + "'");
    }
    return t;
  };

  detail::DotToken t = lex.next();
  if (t.kind != detail::DotToken::kId || t.text != "digraph") {
    throw ParseError("dot:1:1: expected 'digraph'");
  }
  t = lex.next();
  if (t.kind == detail::DotToken::kId) t = lex.next();  // optional name
  if (t.text != "{") {
    throw ParseError("dot:" + std::to_string(t.line) + ":" +
                     std::to_string(t.col) + ": expected '{'");
  }

  std::map<std::string, int> ids;
  std::vector<std::string> names;
  auto node_id = [&](const std::string& name) {
    auto [it, fresh] = ids.try_emplace(name, static_cast<int>(names.size()));
    if (fresh) names.push_back(name);
    return it->second;
  };

  std::vector<Edge> edges;
  t = lex.next();
  while (t.text != "}") {
    if (t.kind != detail::DotToken::kId) {
      throw ParseError("dot:" + std::to_string(t.line) + ":" +
                       std::to_string(t.col) + ": expected node name or '}'");
    }
    std::vector<int> chain{node_id(t.text)};
    t = lex.next();
    while (t.kind == detail::DotToken::kArrow) {
      detail::DotToken dst = lex.next();
      if (dst.kind != detail::DotToken::kId) {
        throw ParseError("dot:" + std::to_string(dst.line) + ":" +
                         std::to_string(dst.col) +
                         ": expected node name after '->'");
      }
      chain.push_back(node_id(dst.text));
      t = lex.next();
    }
    double weight = 1.0;
    int diff_const = 0;
    if (t.text == "[") {
      for (;;) {
        detail::DotToken key = lex.next();
        if (key.text == "]") break;
        if (key.kind != detail::DotToken::kId) {
          throw ParseError("dot:" + std::to_string(key.line) + ":" +
                           std::to_string(key.col) + ": expected attribute key");
        }
        expect("=");
        detail::DotToken val = lex.next();
        if (val.kind != detail::DotToken::kId) {
          throw ParseError("dot:" + std::to_string(val.line) + ":" +
                           std::to_string(val.col) + ": expected attribute value");
        }
        try {
          if (key.text == "weight") {
            weight = std::stod(val.text);
          } else if (key.text == "c" || key.text == "diff_const") {
            diff_const = std::stoi(val.text);
          }
        } catch (const std::exception&) {
          throw ParseError("dot:" + std::to_string(val.line) + ":" +
                           std::to_string(val.col) + ": bad numeric value '" +
                           val.text + "'");
        }
        detail::DotToken sep = lex.next();
        if (sep.text == "]") break;
        if (sep.text != ",") {
          throw ParseError("dot:" + std::to_string(sep.line) + ":" +
                           std::to_string(sep.col) + ": expected ',' or ']'");
        }
      }
      t = lex.next();
    }
    if (weight < 0) {
      throw ParseError("dot:" + std::to_string(t.line) + ": negative weight");
    }
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
      edges.push_back(Edge{chain[k], chain[k + 1], weight, diff_const});
    }
    if (t.text == ";") t = lex.next();
  }
  const int node_count = static_cast<int>(names.size());
  return Dag(node_count, std::move(edges), std::move(names));
}

// ---------------------------------------------------------------------------
// Edge list: one `src dst weight [diff_const]` per line; a line with a
// single integer declares an isolated node; '#' starts a comment.
// ---------------------------------------------------------------------------

inline Dag parse_graph_edgelist(std::string_view text) {
  std::vector<Edge> edges;
  int max_id = -1;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;
    auto where = [&] { return "edgelist:" + std::to_string(lineno) + ": "; };
    auto to_int = [&](const std::string& s) {
      int v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) {
        throw ParseError(where() + "bad integer '" + s + "'");
      }
      return v;
    };
    auto to_dbl = [&](const std::string& s) {
      try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw ParseError(where() + "bad number '" + s + "'");
      }
    };
    if (tok.size() == 1) {
      int v = to_int(tok[0]);
      if (v < 0) throw ParseError(where() + "negative node id");
      max_id = std::max(max_id, v);
      continue;
    }
    if (tok.size() < 3 || tok.size() > 4) {
      throw ParseError(where() + "expected 'src dst weight [diff_const]'");
    }
    Edge e;
    e.src = to_int(tok[0]);
    e.dst = to_int(tok[1]);
    e.weight = to_dbl(tok[2]);
    e.diff_const = tok.size() == 4 ? to_int(tok[3]) : 0;
    if (e.src < 0 || e.dst < 0) throw ParseError(where() + "negative node id");
    if (e.src == e.dst) {
      throw ParseError(where() + "self-loop at node " + tok[0]);
    }
    if (e.weight < 0) throw ParseError(where() + "negative weight");
    max_id = std::max({max_id, e.src, e.dst});
    edges.push_back(e);
  }
  return Dag(max_id + 1, std::move(edges));
}

inline Dag parse_graph(std::string_view text, GraphFormat format) {
  switch (format) {
    case GraphFormat::kJson:
      return parse_graph_json(text);
    case GraphFormat::kDot:
      return parse_graph_dot(text);
    case GraphFormat::kEdgeList:
      return parse_graph_edgelist(text);
  }
  throw ParseError("unknown graph format");
}

inline GraphFormat graph_format_from_name(const std::string& name) {
  if (name == "json") return GraphFormat::kJson;
  if (name == "dot" || name == "gv") return GraphFormat::kDot;
  if (name == "edgelist" || name == "edges" || name == "txt") {
    return GraphFormat::kEdgeList;
  }
  throw ParseError("unknown graph format '" + name + "'");
}

/// Infers the format from the file extension (.json / .dot / .gv, anything
/// else reads as an edge list).
inline Dag load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open graph file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  GraphFormat fmt = GraphFormat::kEdgeList;
  auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    std::string ext = path.substr(dot + 1);
    if (ext == "json") fmt = GraphFormat::kJson;
    else if (ext == "dot" || ext == "gv") fmt = GraphFormat::kDot;
  }
  try {
    return parse_graph(buf.str(), fmt);
  } catch (const ParseError& err) {
    throw ParseError(path + ": " + err.what());
  }
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

inline std::string write_graph_json(const Dag& dag) {
  nlohmann::json doc;
  doc["nodes"] = dag.node_count();
  auto edges = nlohmann::json::array();
  for (const Edge& e : dag.edges()) {
    edges.push_back({e.src, e.dst, e.weight, e.diff_const});
  }
  doc["edges"] = std::move(edges);
  if (!dag.labels().empty()) doc["labels"] = dag.labels();
  return doc.dump(2) + "\n";
}

inline std::string write_graph_dot(const Dag& dag) {
  auto name = [&](int v) {
    if (!dag.labels().empty()) return "\"" + dag.labels()[v] + "\"";
    return "n" + std::to_string(v);
  };
  std::string out = "digraph g {\n";
  // Declaring every node up front pins the name -> id mapping on re-parse.
  for (int v = 0; v < dag.node_count(); ++v) {
    out += "  " + name(v) + ";\n";
  }
  for (const Edge& e : dag.edges()) {
    out += "  " + name(e.src) + " -> " + name(e.dst) +
           " [weight=" + fmt_double(e.weight) +
           ", c=" + std::to_string(e.diff_const) + "];\n";
  }
  out += "}\n";
  return out;
}

inline std::string write_graph_edgelist(const Dag& dag) {
  std::string out;
  for (int v = 0; v < dag.node_count(); ++v) {
    if (dag.in_edges(v).empty() && dag.out_edges(v).empty()) {
      out += std::to_string(v) + "\n";
    }
  }
  for (const Edge& e : dag.edges()) {
    out += std::to_string(e.src) + " " + std::to_string(e.dst) + " " +
           fmt_double(e.weight);
    if (e.diff_const != 0) out += " " + std::to_string(e.diff_const);
    out += "\n";
  }
  return out;
}

inline std::string write_graph(const Dag& dag, GraphFormat format) {
  switch (format) {
    case GraphFormat::kJson:
      return write_graph_json(dag);
    case GraphFormat::kDot:
      return write_graph_dot(dag);
    case GraphFormat::kEdgeList:
      return write_graph_edgelist(dag);
  }
  throw ParseError("unknown graph format");
}

}  // namespace hsched

#endif  // HSCHED_GRAPH_IO_HPP_
