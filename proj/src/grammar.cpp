#include "grammar.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_set>

#include "pattern.hpp"

namespace gw {

std::string to_string(NodeId id) { return "#" + std::to_string(id.value); }

std::string_view repetition_suffix(Repetition rep) {
  switch (rep) {
    case Repetition::One: return "";
    case Repetition::Star: return "*";
    case Repetition::Plus: return "+";
    case Repetition::Opt: return "?";
  }
  return "";
}

const std::string& Term::symbol() const {
  static const std::string empty;
  return std::visit(
      [](const auto& k) -> const std::string& {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, TokenRef> || std::is_same_v<K, RuleRef>)
          return k.name;
        else if constexpr (std::is_same_v<K, LiteralRef>)
          return k.text;
        else
          return empty;
      },
      kind);
}

const Rule* Grammar::find_rule(std::string_view name) const {
  auto it = std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return r.name == name; });
  return it == rules.end() ? nullptr : &*it;
}

Rule* Grammar::find_rule(std::string_view name) {
  return const_cast<Rule*>(std::as_const(*this).find_rule(name));
}

const TokenDef* Grammar::find_token(std::string_view name) const {
  auto it =
      std::find_if(tokens.begin(), tokens.end(), [&](const TokenDef& t) { return t.name == name; });
  return it == tokens.end() ? nullptr : &*it;
}

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

bool is_rule_name(std::string_view s) {
  if (s.empty() || !is_lower(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [](char c) { return is_lower(c) || is_upper(c) || is_digit(c) || c == '_'; });
}

bool is_token_name(std::string_view s) {
  if (s.empty() || !is_upper(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [](char c) { return is_upper(c) || is_digit(c) || c == '_'; });
}

std::string_view node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Grammar: return "grammar";
    case NodeKind::Rule: return "rule";
    case NodeKind::Production: return "production";
    case NodeKind::Term: return "term";
  }
  return "grammar";
}

// ---------------------------------------------------------------------------
// Paths

NodeId NodeRef::id(const Grammar& g) const {
  switch (kind) {
    case NodeKind::Grammar: return g.root_id;
    case NodeKind::Rule: return rule->id;
    case NodeKind::Production: return production->id;
    case NodeKind::Term: return term->id;
  }
  return {};
}

namespace {

[[noreturn]] void bad_path(std::string_view path, const std::string& why) {
  throw DiagnosticError(make_error("E_BAD_PATH", "bad object path '" + std::string(path) + "': " + why));
}

bool parse_index(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  if (!std::all_of(s.begin(), s.end(), is_digit)) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

NodeLocation parse_path(const Grammar& g, std::string_view path) {
  NodeLocation loc;
  if (path == "$grammar") return loc;
  if (path.empty()) bad_path(path, "empty path");

  std::vector<std::string_view> segs;
  std::size_t start = 0;
  for (;;) {
    auto dot = path.find('.', start);
    segs.push_back(path.substr(start, dot == std::string_view::npos ? dot : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }

  auto rit = std::find_if(g.rules.begin(), g.rules.end(),
                          [&](const Rule& r) { return r.name == segs[0]; });
  if (rit == g.rules.end()) bad_path(path, "no rule named '" + std::string(segs[0]) + "'");
  loc.kind = NodeKind::Rule;
  loc.rule = static_cast<std::size_t>(rit - g.rules.begin());
  if (segs.size() == 1) return loc;

  std::string_view ps = segs[1];
  std::size_t idx = 0;
  if (ps.size() < 2 || ps[0] != 'p' || !parse_index(ps.substr(1), idx))
    bad_path(path, "expected production segment 'pN'");
  if (idx >= rit->productions.size()) bad_path(path, "production index out of range");
  loc.kind = NodeKind::Production;
  loc.production = idx;

  const std::vector<Term>* terms = &rit->productions[idx].terms;
  for (std::size_t k = 2; k < segs.size(); ++k) {
    std::string_view ts = segs[k];
    if (ts.size() < 2 || ts[0] != 't' || !parse_index(ts.substr(1), idx))
      bad_path(path, "expected term segment 'tN'");
    if (terms == nullptr) bad_path(path, "term segment below a non-group term");
    if (idx >= terms->size()) bad_path(path, "term index out of range");
    loc.kind = NodeKind::Term;
    loc.terms.push_back(idx);
    const Group* grp = (*terms)[idx].group();
    terms = grp ? &grp->body : nullptr;
  }
  return loc;
}

std::string format_path(const Grammar& g, const NodeLocation& loc) {
  if (loc.kind == NodeKind::Grammar) return "$grammar";
  std::string out = g.rules.at(loc.rule).name;
  if (loc.kind == NodeKind::Rule) return out;
  out += ".p" + std::to_string(loc.production);
  for (std::size_t t : loc.terms) out += ".t" + std::to_string(t);
  return out;
}

namespace {

bool find_in_terms(const std::vector<Term>& terms, NodeId id, std::vector<std::size_t>& trail) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    trail.push_back(i);
    if (terms[i].id == id) return true;
    if (const Group* grp = terms[i].group())
      if (find_in_terms(grp->body, id, trail)) return true;
    trail.pop_back();
  }
  return false;
}

}  // namespace

std::optional<NodeLocation> locate(const Grammar& g, NodeId id) {
  if (!id) return std::nullopt;
  if (id == g.root_id) return NodeLocation{};
  for (std::size_t r = 0; r < g.rules.size(); ++r) {
    const Rule& rule = g.rules[r];
    if (rule.id == id) return NodeLocation{NodeKind::Rule, r, 0, {}};
    for (std::size_t p = 0; p < rule.productions.size(); ++p) {
      const Production& prod = rule.productions[p];
      if (prod.id == id) return NodeLocation{NodeKind::Production, r, p, {}};
      std::vector<std::size_t> trail;
      if (find_in_terms(prod.terms, id, trail)) return NodeLocation{NodeKind::Term, r, p, trail};
    }
  }
  return std::nullopt;
}

NodeRef deref(const Grammar& g, const NodeLocation& loc) {
  NodeRef ref;
  ref.kind = loc.kind;
  if (loc.kind == NodeKind::Grammar) return ref;
  ref.rule = &g.rules.at(loc.rule);
  if (loc.kind == NodeKind::Rule) return ref;
  ref.production = &ref.rule->productions.at(loc.production);
  if (loc.kind == NodeKind::Production) return ref;
  const std::vector<Term>* terms = &ref.production->terms;
  for (std::size_t i = 0; i < loc.terms.size(); ++i) {
    ref.term = &terms->at(loc.terms[i]);
    if (const Group* grp = ref.term->group()) terms = &grp->body;
  }
  return ref;
}

NodeRef resolve_path(const Grammar& g, std::string_view path) {
  return deref(g, parse_path(g, path));
}

std::optional<std::string> path_of(const Grammar& g, NodeId id) {
  auto loc = locate(g, id);
  if (!loc) return std::nullopt;
  return format_path(g, *loc);
}

Rule& rule_at(Grammar& g, const NodeLocation& loc) { return g.rules.at(loc.rule); }

Production& production_at(Grammar& g, const NodeLocation& loc) {
  return rule_at(g, loc).productions.at(loc.production);
}

std::vector<Term>& term_container(Grammar& g, const NodeLocation& loc) {
  std::vector<Term>* terms = &production_at(g, loc).terms;
  for (std::size_t i = 0; i + 1 < loc.terms.size(); ++i)
    terms = &std::get<Group>(terms->at(loc.terms[i]).kind).body;
  return *terms;
}

Term& term_at(Grammar& g, const NodeLocation& loc) {
  return term_container(g, loc).at(loc.terms.back());
}

namespace {

void visit_terms(const std::vector<Term>& terms, NodeLocation& loc,
                 const std::function<void(const NodeLocation&, NodeId)>& visit) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    loc.terms.push_back(i);
    visit(loc, terms[i].id);
    if (const Group* grp = terms[i].group()) visit_terms(grp->body, loc, visit);
    loc.terms.pop_back();
  }
}

}  // namespace

void for_each_node(const Grammar& g,
                   const std::function<void(const NodeLocation&, NodeId)>& visit) {
  for (std::size_t r = 0; r < g.rules.size(); ++r) {
    NodeLocation loc{NodeKind::Rule, r, 0, {}};
    visit(loc, g.rules[r].id);
    for (std::size_t p = 0; p < g.rules[r].productions.size(); ++p) {
      loc.kind = NodeKind::Production;
      loc.production = p;
      visit(loc, g.rules[r].productions[p].id);
      loc.kind = NodeKind::Term;
      visit_terms(g.rules[r].productions[p].terms, loc, visit);
    }
  }
}

void collect_ids(const Term& term, std::vector<NodeId>& out) {
  out.push_back(term.id);
  if (const Group* grp = term.group())
    for (const Term& t : grp->body) collect_ids(t, out);
}

void collect_ids(const Production& p, std::vector<NodeId>& out) {
  out.push_back(p.id);
  for (const Term& t : p.terms) collect_ids(t, out);
}

void collect_ids(const Rule& r, std::vector<NodeId>& out) {
  out.push_back(r.id);
  for (const Production& p : r.productions) collect_ids(p, out);
}

// ---------------------------------------------------------------------------
// Well-formedness

namespace {

void check_terms(const Grammar& g, const std::vector<Term>& terms, NodeLocation& loc,
                 Diagnostics& out) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    loc.terms.push_back(i);
    const Term& t = terms[i];
    auto path = [&] { return format_path(g, loc); };
    if (const auto* tok = std::get_if<TokenRef>(&t.kind)) {
      if (!is_token_name(tok->name))
        out.push_back(make_error("E_BAD_NAME", "invalid token name '" + tok->name + "'", t.span, path()));
      else if (!g.find_token(tok->name))
        out.push_back(make_error("E_UNDEF_TOKEN", "undefined token '" + tok->name + "'", t.span, path()));
    } else if (const auto* rr = std::get_if<RuleRef>(&t.kind)) {
      if (!g.find_rule(rr->name))
        out.push_back(make_error("E_UNDEF_RULE", "undefined rule '" + rr->name + "'", t.span, path()));
    } else if (const auto* lit = std::get_if<LiteralRef>(&t.kind)) {
      if (lit->text.empty())
        out.push_back(make_error("E_EMPTY_LITERAL", "empty literal", t.span, path()));
    } else if (const Group* grp = t.group()) {
      if (grp->body.empty())
        out.push_back(make_error("E_EMPTY_GROUP", "group has no terms", t.span, path()));
      check_terms(g, grp->body, loc, out);
    }
    loc.terms.pop_back();
  }
}

}  // namespace

Diagnostics check_well_formed(const Grammar& g) {
  Diagnostics out;
  std::set<std::string> tok_names;
  for (const TokenDef& td : g.tokens) {
    if (!is_token_name(td.name))
      out.push_back(make_error("E_BAD_NAME", "invalid token name '" + td.name + "'", td.span));
    if (!tok_names.insert(td.name).second)
      out.push_back(make_error("E_DUP_TOKEN", "duplicate token '" + td.name + "'", td.span));
    try {
      TokenPattern::compile(td.pattern);
    } catch (const PatternError& e) {
      out.push_back(make_error("E_BAD_REGEX",
                               "token " + td.name + ": " + e.what() + " at offset " +
                                   std::to_string(e.offset()),
                               td.span));
    }
  }

  std::set<std::string> rule_names;
  for (std::size_t r = 0; r < g.rules.size(); ++r) {
    const Rule& rule = g.rules[r];
    NodeLocation loc{NodeKind::Rule, r, 0, {}};
    if (!rule.synthetic() && !is_rule_name(rule.name))
      out.push_back(make_error("E_BAD_NAME", "invalid rule name '" + rule.name + "'", rule.span,
                               rule.name));
    if (!rule_names.insert(rule.name).second)
      out.push_back(make_error("E_DUP_RULE", "duplicate rule '" + rule.name + "'", rule.span,
                               rule.name));
    if (rule.productions.empty())
      out.push_back(make_error("E_EMPTY_RULE", "rule '" + rule.name + "' has no productions",
                               rule.span, rule.name));
    for (std::size_t p = 0; p < rule.productions.size(); ++p) {
      loc.kind = NodeKind::Term;
      loc.production = p;
      check_terms(g, rule.productions[p].terms, loc, out);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Printing

std::string quote_literal(std::string_view text) {
  std::string out = "'";
  for (char c : text) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '\'';
  return out;
}

namespace {

void print_term(const Term& t, std::string& out) {
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LiteralRef>) {
          out += quote_literal(k.text);
        } else if constexpr (std::is_same_v<K, Group>) {
          out += '(';
          out += print_terms(k.body);
          out += ')';
          out += repetition_suffix(k.rep);
        } else {
          out += k.name;
        }
      },
      t.kind);
}

}  // namespace

std::string print_terms(const std::vector<Term>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += ' ';
    print_term(terms[i], out);
  }
  return out;
}

std::string pretty_print(const Grammar& g) {
  std::string out;
  if (!g.tokens.empty()) {
    out += "tokens {\n";
    for (const TokenDef& td : g.tokens) {
      out += "    " + td.name + " : /" + td.pattern + "/";
      if (td.skip) out += " skip";
      out += " ;\n";
    }
    out += "}\n";
    if (!g.rules.empty()) out += '\n';
  }
  for (const Rule& r : g.rules) {
    if (r.productions.size() == 1) {
      const auto& terms = r.productions.front().terms;
      out += r.name + " :";
      if (!terms.empty()) out += ' ' + print_terms(terms);
      out += " ;\n";
      continue;
    }
    out += r.name + '\n';
    for (const Production& p : r.productions) {
      out += "    :";
      if (!p.terms.empty()) out += ' ' + print_terms(p.terms);
      out += '\n';
    }
    out += "    ;\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structural equality

bool structurally_equal(const Term& a, const Term& b) {
  if (a.kind.index() != b.kind.index()) return false;
  if (const Group* ga = a.group()) {
    const Group* gb = b.group();
    if (ga->rep != gb->rep || ga->body.size() != gb->body.size()) return false;
    for (std::size_t i = 0; i < ga->body.size(); ++i)
      if (!structurally_equal(ga->body[i], gb->body[i])) return false;
    return true;
  }
  return a.symbol() == b.symbol();
}

bool structurally_equal(const Production& a, const Production& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i)
    if (!structurally_equal(a.terms[i], b.terms[i])) return false;
  return true;
}

bool structurally_equal(const Rule& a, const Rule& b) {
  if (a.name != b.name || a.synthetic() != b.synthetic() ||
      a.productions.size() != b.productions.size())
    return false;
  for (std::size_t i = 0; i < a.productions.size(); ++i)
    if (!structurally_equal(a.productions[i], b.productions[i])) return false;
  return true;
}

bool structurally_equal(const Grammar& a, const Grammar& b) {
  if (a.tokens.size() != b.tokens.size() || a.rules.size() != b.rules.size()) return false;
  for (std::size_t i = 0; i < a.tokens.size(); ++i) {
    const TokenDef& x = a.tokens[i];
    const TokenDef& y = b.tokens[i];
    if (x.name != y.name || x.pattern != y.pattern || x.skip != y.skip) return false;
  }
  for (std::size_t i = 0; i < a.rules.size(); ++i)
    if (!structurally_equal(a.rules[i], b.rules[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Desugaring

namespace {

class Desugarer {
 public:
  explicit Desugarer(Grammar& g) : g_(g) {}

  // Rewrites groups in `terms` (in place); synthetic rules are appended to `extra`.
  void rewrite(const std::string& owner, std::vector<Term>& terms, std::vector<Rule>& extra) {
    for (Term& t : terms) {
      Group* grp = t.group();
      if (!grp) continue;
      std::string name = owner + "%g" + std::to_string(counter_++);
      Rule syn;
      syn.id = g_.new_id();
      syn.name = name;
      syn.span = t.span;
      syn.synthetic_from = t.id;
      syn.synthetic_rep = grp->rep;

      std::vector<Term> body = std::move(grp->body);
      std::size_t slot = extra.size();
      rewrite(owner, body, extra);

      Term self;
      self.id = g_.new_id();
      self.kind = RuleRef{name};
      self.span = t.span;
      self.origin = t.id;

      auto prod = [&](std::vector<Term> ts) {
        Production p;
        p.id = g_.new_id();
        p.terms = std::move(ts);
        p.span = t.span;
        return p;
      };
      auto with_self = [&](std::vector<Term> ts) {
        ts.insert(ts.begin(), self);
        return ts;
      };

      switch (syn.synthetic_rep) {
        case Repetition::One:
          syn.productions.push_back(prod(std::move(body)));
          break;
        case Repetition::Star:
          syn.productions.push_back(prod({}));
          syn.productions.push_back(prod(with_self(std::move(body))));
          break;
        case Repetition::Plus: {
          std::vector<Term> copy = clone(body);
          syn.productions.push_back(prod(std::move(body)));
          syn.productions.push_back(prod(with_self(std::move(copy))));
          break;
        }
        case Repetition::Opt:
          syn.productions.push_back(prod({}));
          syn.productions.push_back(prod(std::move(body)));
          break;
      }

      // The reference keeps the group's identity so trees can map back to it.
      t.kind = RuleRef{name};
      extra.insert(extra.begin() + static_cast<std::ptrdiff_t>(slot), std::move(syn));
    }
  }

  void reset_counter() { counter_ = 0; }

 private:
  std::vector<Term> clone(const std::vector<Term>& terms) {
    std::vector<Term> out;
    out.reserve(terms.size());
    for (const Term& t : terms) {
      Term c = t;
      c.id = g_.new_id();
      c.origin = t.source_id();
      if (Group* grp = c.group()) grp->body = clone(t.group()->body);
      out.push_back(std::move(c));
    }
    return out;
  }

  Grammar& g_;
  std::size_t counter_ = 0;
};

}  // namespace

Grammar desugar_groups(const Grammar& g) {
  Grammar out = g;
  std::vector<Rule> rules = std::move(out.rules);
  out.rules.clear();
  Desugarer d(out);
  for (Rule& r : rules) {
    std::vector<Rule> extra;
    d.reset_counter();
    for (Production& p : r.productions) d.rewrite(r.name, p.terms, extra);
    out.rules.push_back(std::move(r));
    for (Rule& e : extra) out.rules.push_back(std::move(e));
  }
  return out;
}

}  // namespace gw
