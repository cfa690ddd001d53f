#include "ast.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "json.hpp"

namespace gw {

namespace {

using nlohmann::ordered_json;

bool has_list_group(const std::vector<Term>& terms, const MetadataStore& store,
                    std::string& list_role) {
  bool found = false;
  for (const Term& t : terms) {
    const Group* grp = t.group();
    if (!grp) continue;
    if (const auto* v = store.get(t.id, "ast.list"); v && *v == MetaValue{true}) {
      if (!found) {
        if (const auto* r = store.get(t.id, "ast.role"))
          if (const auto* s = std::get_if<std::string>(r)) list_role = *s;
      }
      found = true;
    }
    std::string inner;
    if (has_list_group(grp->body, store, inner)) {
      if (!found && !inner.empty()) list_role = inner;
      found = true;
    }
  }
  return found;
}

const std::string* string_meta(const MetadataStore& store, NodeId id, const char* key) {
  const MetaValue* v = store.get(id, key);
  return v ? std::get_if<std::string>(v) : nullptr;
}

const bool* bool_meta(const MetadataStore& store, NodeId id, const char* key) {
  const MetaValue* v = store.get(id, key);
  return v ? std::get_if<bool>(v) : nullptr;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class AstBuilder {
 public:
  AstBuilder(const Grammar& g, const MetadataStore& store) : g_(g), store_(store) {}

  AstNode build(const ParseNode& n) {
    if (n.kind == ParseNode::Kind::Leaf) return token(n);

    bool list_mode = false;
    std::string list_role = "items";
    if (auto loc = locate(g_, n.production); loc && loc->kind == NodeKind::Production) {
      std::string role;
      list_mode = has_list_group(deref(g_, *loc).production->terms, store_, role);
      if (!role.empty()) list_role = role;
    }

    std::vector<AstField> fields;
    std::map<std::string, std::size_t> by_role;
    auto put = [&](const std::string& role, AstNode v) {
      auto it = by_role.find(role);
      if (it == by_role.end()) {
        by_role.emplace(role, fields.size());
        fields.push_back(AstField{role, false, {}});
        fields.back().values.push_back(std::move(v));
        return;
      }
      AstField& f = fields[it->second];
      f.list = true;
      f.values.push_back(std::move(v));
    };
    if (list_mode) {
      by_role.emplace(list_role, 0);
      fields.push_back(AstField{list_role, true, {}});
    }

    for (const ParseNode& c : n.children) {
      const bool* skip = bool_meta(store_, c.term, "ast.skip");
      if (skip && *skip) continue;
      const std::string* role = string_meta(store_, c.term, "ast.role");
      bool is_literal = c.kind == ParseNode::Kind::Leaf && c.token.literal;
      if (is_literal && !role && !skip) continue;

      AstNode value = build(c);
      if (role) {
        put(*role, std::move(value));
      } else if (list_mode) {
        fields.front().values.push_back(std::move(value));
      } else if (c.kind == ParseNode::Kind::Leaf) {
        put(c.token.literal ? c.token.terminal : lowercase(c.token.terminal), std::move(value));
      } else {
        put(c.rule_name, std::move(value));
      }
    }

    std::size_t total = 0;
    for (const AstField& f : fields) total += f.values.size();
    const std::string* label = string_meta(store_, n.production, "ast.node");
    // A labelled list production holding a single list item collapses to it.
    bool promote = total == 1 && (!label || (list_mode && fields.front().values.size() == 1));
    if (promote)
      for (AstField& f : fields)
        if (!f.values.empty()) return std::move(f.values.front());

    AstNode out;
    out.kind = AstNode::Kind::Node;
    out.label = label ? *label : n.rule_name;
    out.fields = std::move(fields);
    out.begin = n.begin;
    out.end = n.end;
    return out;
  }

 private:
  static AstNode token(const ParseNode& n) {
    AstNode t;
    t.kind = AstNode::Kind::Token;
    t.terminal = n.token.terminal;
    t.literal = n.token.literal;
    t.text = n.token.lexeme;
    t.begin = n.begin;
    t.end = n.end;
    return t;
  }

  const Grammar& g_;
  const MetadataStore& store_;
};

ordered_json span_json(std::size_t b, std::size_t e) {
  ordered_json s;
  s["begin"] = b;
  s["end"] = e;
  return s;
}

ordered_json ast_json(const AstNode& a) {
  ordered_json j;
  if (a.kind == AstNode::Kind::Token) {
    j["kind"] = "token";
    j["terminal"] = a.literal ? quote_literal(a.terminal) : a.terminal;
    j["text"] = a.text;
    j["span"] = span_json(a.begin, a.end);
    return j;
  }
  j["kind"] = "node";
  j["label"] = a.label;
  j["span"] = span_json(a.begin, a.end);
  ordered_json kids = ordered_json::array();
  for (const AstField& f : a.fields) {
    ordered_json field;
    field["role"] = f.role;
    if (f.list) {
      field["list"] = true;
      ordered_json items = ordered_json::array();
      for (const AstNode& v : f.values) items.push_back(ast_json(v));
      field["items"] = std::move(items);
    } else {
      field["value"] = ast_json(f.values.front());
    }
    kids.push_back(std::move(field));
  }
  j["children"] = std::move(kids);
  return j;
}

void ast_sexpr(const AstNode& a, std::string& out) {
  if (a.kind == AstNode::Kind::Token) {
    out += ordered_json(a.text).dump();
    return;
  }
  out += "(" + a.label;
  for (const AstField& f : a.fields) {
    out += " " + f.role + ":";
    if (!f.list) {
      ast_sexpr(f.values.front(), out);
      continue;
    }
    out += "[";
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      if (i) out += " ";
      ast_sexpr(f.values[i], out);
    }
    out += "]";
  }
  out += ")";
}

ordered_json tree_json(const ParseNode& n) {
  ordered_json j;
  if (n.kind == ParseNode::Kind::Leaf) {
    j["kind"] = "token";
    j["terminal"] = n.token.literal ? quote_literal(n.token.terminal) : n.token.terminal;
    j["text"] = n.token.lexeme;
    j["span"] = span_json(n.begin, n.end);
    return j;
  }
  j["kind"] = "rule";
  j["rule"] = n.rule_name;
  j["production"] = n.production_index;
  j["span"] = span_json(n.begin, n.end);
  ordered_json kids = ordered_json::array();
  for (const ParseNode& c : n.children) kids.push_back(tree_json(c));
  j["children"] = std::move(kids);
  return j;
}

void tree_sexpr(const ParseNode& n, std::string& out) {
  if (n.kind == ParseNode::Kind::Leaf) {
    if (n.token.literal)
      out += quote_literal(n.token.terminal);
    else
      out += n.token.terminal + ":" + ordered_json(n.token.lexeme).dump();
    return;
  }
  out += "(" + n.rule_name;
  for (const ParseNode& c : n.children) {
    out += " ";
    tree_sexpr(c, out);
  }
  out += ")";
}

std::string dump(const ordered_json& j, int indent) {
  return (indent < 0 ? j.dump() : j.dump(indent)) + "\n";
}

}  // namespace

AstNode build_ast(const Grammar& g, const ParseNode& tree, const MetadataStore& store) {
  return AstBuilder(g, store).build(tree);
}

std::size_t node_count(const AstNode& ast) {
  std::size_t n = 1;
  for (const AstField& f : ast.fields)
    for (const AstNode& v : f.values) n += node_count(v);
  return n;
}

std::string ast_to_json(const AstNode& ast, int indent) { return dump(ast_json(ast), indent); }

std::string ast_to_sexpr(const AstNode& ast) {
  std::string out;
  ast_sexpr(ast, out);
  return out + "\n";
}

std::string tree_to_json(const ParseNode& tree, int indent) {
  return dump(tree_json(tree), indent);
}

std::string tree_to_sexpr(const ParseNode& tree) {
  std::string out;
  tree_sexpr(tree, out);
  return out + "\n";
}

}  // namespace gw
