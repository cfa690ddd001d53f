#include "earley.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace gw {

namespace {

struct Sym {
  bool terminal = false;
  bool literal = false;
  std::string text;  // terminal name / literal text
  int rule = -1;     // nonterminal index
  NodeId source;     // term id in the original grammar
};

struct Prod {
  int rule = 0;
  std::vector<Sym> syms;
  NodeId id;
  std::size_t index = 0;  // position within its rule
};

struct RuleInfo {
  std::string name;
  NodeId id;
  std::vector<int> prods;
  bool synthetic = false;
  NodeId group;  // for synthetic rules
};

struct Item {
  int prod;
  int dot;
  int origin;
};

std::uint64_t pack(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return (a << 42) ^ (b << 21) ^ c;
}

bool matches(const Sym& s, const Token& t) {
  return s.literal == t.literal && s.text == t.terminal;
}

}  // namespace

struct EarleyParser::Impl {
  std::vector<RuleInfo> rules;
  std::vector<Prod> prods;
  std::vector<bool> nullable;
  std::unordered_map<std::string, int> rule_index;

  explicit Impl(const Grammar& original) {
    Grammar g = desugar_groups(original);
    for (std::size_t r = 0; r < g.rules.size(); ++r)
      rule_index.emplace(g.rules[r].name, static_cast<int>(r));
    for (std::size_t r = 0; r < g.rules.size(); ++r) {
      const Rule& rule = g.rules[r];
      RuleInfo info{rule.name, rule.id, {}, rule.synthetic(), rule.synthetic_from};
      for (std::size_t p = 0; p < rule.productions.size(); ++p) {
        Prod prod;
        prod.rule = static_cast<int>(r);
        prod.id = rule.productions[p].id;
        prod.index = p;
        for (const Term& t : rule.productions[p].terms) {
          Sym s;
          s.source = t.source_id();
          if (const auto* tok = std::get_if<TokenRef>(&t.kind)) {
            s.terminal = true;
            s.text = tok->name;
          } else if (const auto* lit = std::get_if<LiteralRef>(&t.kind)) {
            s.terminal = true;
            s.literal = true;
            s.text = lit->text;
          } else if (const auto* rr = std::get_if<RuleRef>(&t.kind)) {
            auto it = rule_index.find(rr->name);
            // Undefined references never derive anything.
            s.rule = it == rule_index.end() ? -1 : it->second;
            s.text = rr->name;
          }
          prod.syms.push_back(std::move(s));
        }
        info.prods.push_back(static_cast<int>(prods.size()));
        prods.push_back(std::move(prod));
      }
      rules.push_back(std::move(info));
    }

    nullable.assign(rules.size(), false);
    for (bool changed = true; changed;) {
      changed = false;
      for (const Prod& p : prods) {
        if (nullable[static_cast<std::size_t>(p.rule)]) continue;
        bool all = std::all_of(p.syms.begin(), p.syms.end(), [&](const Sym& s) {
          return !s.terminal && s.rule >= 0 && nullable[static_cast<std::size_t>(s.rule)];
        });
        if (all) {
          nullable[static_cast<std::size_t>(p.rule)] = true;
          changed = true;
        }
      }
    }
  }

  int start_rule(std::string_view start) const {
    auto it = rule_index.find(std::string(start));
    if (it == rule_index.end() || rules[static_cast<std::size_t>(it->second)].synthetic) return -1;
    return it->second;
  }

  // Result of a chart run.
  struct Chart {
    std::size_t n = 0;
    std::size_t furthest = 0;  // last set that holds any item
    std::unordered_set<std::uint64_t> done_prod;                 // (prod, i, j)
    std::unordered_map<std::uint64_t, std::set<std::size_t>> ends;  // (rule, i) -> {j}

    bool completed(int prod, std::size_t i, std::size_t j) const {
      return done_prod.count(pack(static_cast<std::uint64_t>(prod), i, j)) != 0;
    }
    const std::set<std::size_t>* ends_of(int rule, std::size_t i) const {
      auto it = ends.find(pack(static_cast<std::uint64_t>(rule), i, 0));
      return it == ends.end() ? nullptr : &it->second;
    }
  };

  Chart run(int start, std::span<const Token> tokens) const {
    Chart chart;
    std::size_t n = tokens.size();
    chart.n = n;
    std::vector<std::vector<Item>> sets(n + 1);
    std::vector<std::unordered_set<std::uint64_t>> seen(n + 1);
    // waiting[j][rule] -> items in set j whose next symbol is `rule`
    std::vector<std::unordered_map<int, std::vector<Item>>> waiting(n + 1);

    auto add = [&](std::size_t j, Item it) {
      auto key = pack(static_cast<std::uint64_t>(it.prod), static_cast<std::uint64_t>(it.dot),
                      static_cast<std::uint64_t>(it.origin));
      if (!seen[j].insert(key).second) return;
      sets[j].push_back(it);
      const Prod& p = prods[static_cast<std::size_t>(it.prod)];
      if (static_cast<std::size_t>(it.dot) < p.syms.size()) {
        const Sym& s = p.syms[static_cast<std::size_t>(it.dot)];
        if (!s.terminal && s.rule >= 0) waiting[j][s.rule].push_back(it);
      }
    };

    for (int p : rules[static_cast<std::size_t>(start)].prods) add(0, Item{p, 0, 0});

    for (std::size_t j = 0; j <= n; ++j) {
      if (!sets[j].empty()) chart.furthest = j;
      for (std::size_t k = 0; k < sets[j].size(); ++k) {
        Item it = sets[j][k];
        const Prod& p = prods[static_cast<std::size_t>(it.prod)];
        if (static_cast<std::size_t>(it.dot) < p.syms.size()) {
          const Sym& s = p.syms[static_cast<std::size_t>(it.dot)];
          if (s.terminal) {
            if (j < n && matches(s, tokens[j])) add(j + 1, Item{it.prod, it.dot + 1, it.origin});
          } else if (s.rule >= 0) {
            for (int q : rules[static_cast<std::size_t>(s.rule)].prods)
              add(j, Item{q, 0, static_cast<int>(j)});
            if (nullable[static_cast<std::size_t>(s.rule)])
              add(j, Item{it.prod, it.dot + 1, it.origin});
          }
          continue;
        }
        auto origin = static_cast<std::size_t>(it.origin);
        chart.done_prod.insert(pack(static_cast<std::uint64_t>(it.prod), origin, j));
        chart.ends[pack(static_cast<std::uint64_t>(p.rule), origin, 0)].insert(j);
        auto w = waiting[origin].find(p.rule);
        if (w == waiting[origin].end()) continue;
        std::vector<Item> parents = w->second;  // may grow while we add
        for (const Item& parent : parents)
          add(j, Item{parent.prod, parent.dot + 1, parent.origin});
      }
    }
    return chart;
  }

  bool accepted(const Chart& c, int start) const {
    const auto* e = c.ends_of(start, 0);
    return e && e->count(c.n);
  }
};

namespace {

// Pulls one derivation out of a finished chart.
class TreeBuilder {
 public:
  struct Child {
    bool terminal;
    std::size_t token;  // terminal
    int node;           // nonterminal: arena index
    std::size_t begin, end;
  };
  struct INode {
    int prod;
    std::size_t i, j;
    std::vector<Child> children;
  };

  TreeBuilder(const EarleyParser::Impl& g, const EarleyParser::Impl::Chart& c,
              std::span<const Token> tokens)
      : g_(g), c_(c), tokens_(tokens) {}

  std::vector<INode> arena;
  bool ambiguous = false;
  std::string ambiguity_at;
  std::size_t ambiguity_token = 0;

  std::optional<int> build(int rule, std::size_t i, std::size_t j) {
    auto key = pack(static_cast<std::uint64_t>(rule), i, j);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (!active_.insert(key).second) return std::nullopt;

    std::optional<int> result;
    std::size_t candidates = 0;
    for (int p : g_.rules[static_cast<std::size_t>(rule)].prods) {
      if (!c_.completed(p, i, j)) continue;
      ++candidates;
      if (result) continue;
      std::vector<Child> kids;
      bool ok = splits(p, 0, i, j, kids, [&](std::vector<Child>& done) {
        // Resolve the nonterminal children; reject the split on a cycle.
        std::vector<Child> built = done;
        const Prod& pr = g_.prods[static_cast<std::size_t>(p)];
        for (std::size_t k = 0; k < built.size(); ++k) {
          if (built[k].terminal) continue;
          const Sym& s = pr.syms[k];
          auto sub = build(s.rule, built[k].begin, built[k].end);
          if (!sub) return false;
          built[k].node = *sub;
        }
        arena.push_back(INode{p, i, j, std::move(built)});
        result = static_cast<int>(arena.size()) - 1;
        return true;
      });
      if (ok && count_splits(p, i, j) > 1) note_ambiguity(rule, i);
    }
    if (candidates > 1) note_ambiguity(rule, i);
    active_.erase(key);
    if (result) memo_[key] = *result;
    return result;
  }

 private:
  void note_ambiguity(int rule, std::size_t i) {
    if (ambiguous) return;
    ambiguous = true;
    ambiguity_at = g_.rules[static_cast<std::size_t>(rule)].name;
    ambiguity_token = i;
  }

  bool suffix_derives(int p, std::size_t k, std::size_t e, std::size_t j) {
    const Prod& pr = g_.prods[static_cast<std::size_t>(p)];
    if (k == pr.syms.size()) return e == j;
    auto key = std::make_tuple(p, k, e, j);
    if (auto it = suffix_memo_.find(key); it != suffix_memo_.end()) return it->second;
    bool ok = false;
    const Sym& s = pr.syms[k];
    if (s.terminal) {
      ok = e < j && matches(s, tokens_[e]) && suffix_derives(p, k + 1, e + 1, j);
    } else if (s.rule >= 0) {
      if (const auto* ends = c_.ends_of(s.rule, e))
        for (std::size_t m : *ends) {
          if (m > j) break;
          if (suffix_derives(p, k + 1, m, j)) {
            ok = true;
            break;
          }
        }
    }
    suffix_memo_[key] = ok;
    return ok;
  }

  // Enumerates splits of production p over [e, j) from symbol k on, shortest
  // child spans first. `accept` returns true to stop.
  template <class Accept>
  bool splits(int p, std::size_t k, std::size_t e, std::size_t j, std::vector<Child>& kids,
              Accept&& accept) {
    const Prod& pr = g_.prods[static_cast<std::size_t>(p)];
    if (k == pr.syms.size()) return e == j && accept(kids);
    const Sym& s = pr.syms[k];
    if (s.terminal) {
      if (e >= j || !matches(s, tokens_[e])) return false;
      kids.push_back(Child{true, e, -1, e, e + 1});
      bool stop = splits(p, k + 1, e + 1, j, kids, accept);
      kids.pop_back();
      return stop;
    }
    if (s.rule < 0) return false;
    const auto* ends = c_.ends_of(s.rule, e);
    if (!ends) return false;
    for (std::size_t m : *ends) {
      if (m > j) break;
      if (!suffix_derives(p, k + 1, m, j)) continue;
      kids.push_back(Child{false, 0, -1, e, m});
      bool stop = splits(p, k + 1, m, j, kids, accept);
      kids.pop_back();
      if (stop) return true;
    }
    return false;
  }

  std::size_t count_splits(int p, std::size_t i, std::size_t j) {
    std::size_t n = 0;
    std::vector<Child> kids;
    splits(p, 0, i, j, kids, [&](std::vector<Child>&) { return ++n >= 2; });
    return n;
  }

  struct TupleHash {
    std::size_t operator()(const std::tuple<int, std::size_t, std::size_t, std::size_t>& t) const {
      auto [a, b, c, d] = t;
      return std::hash<std::uint64_t>{}(pack(static_cast<std::uint64_t>(a), b, c) * 1000003u + d);
    }
  };

  const EarleyParser::Impl& g_;
  const EarleyParser::Impl::Chart& c_;
  std::span<const Token> tokens_;
  std::unordered_map<std::uint64_t, int> memo_;
  std::unordered_set<std::uint64_t> active_;
  std::unordered_map<std::tuple<int, std::size_t, std::size_t, std::size_t>, bool, TupleHash>
      suffix_memo_;
};

// Converts arena nodes into public trees, splicing synthetic group rules.
class TreeConverter {
 public:
  TreeConverter(const EarleyParser::Impl& g, const std::vector<TreeBuilder::INode>& arena,
                std::span<const Token> tokens)
      : g_(g), arena_(arena), tokens_(tokens) {}

  ParseNode convert(int idx, NodeId term, std::vector<GroupStep> groups) {
    const auto& n = arena_[static_cast<std::size_t>(idx)];
    const Prod& p = g_.prods[static_cast<std::size_t>(n.prod)];
    const RuleInfo& r = g_.rules[static_cast<std::size_t>(p.rule)];
    ParseNode out;
    out.kind = ParseNode::Kind::Rule;
    out.rule = r.id;
    out.production = p.id;
    out.rule_name = r.name;
    out.production_index = p.index;
    out.term = term;
    out.groups = std::move(groups);
    out.first_token = n.i;
    out.end_token = n.j;
    set_bytes(out);
    append(idx, 0, {}, out.children);
    return out;
  }

 private:
  void append(int idx, std::size_t from, const std::vector<GroupStep>& groups,
              std::vector<ParseNode>& out) {
    const auto& n = arena_[static_cast<std::size_t>(idx)];
    const Prod& p = g_.prods[static_cast<std::size_t>(n.prod)];
    for (std::size_t k = from; k < n.children.size(); ++k) {
      const auto& c = n.children[k];
      const Sym& s = p.syms[k];
      if (c.terminal) {
        ParseNode leaf;
        leaf.kind = ParseNode::Kind::Leaf;
        leaf.token = tokens_[c.token];
        leaf.term = s.source;
        leaf.groups = groups;
        leaf.first_token = c.token;
        leaf.end_token = c.token + 1;
        set_bytes(leaf);
        out.push_back(std::move(leaf));
        continue;
      }
      const RuleInfo& sub = g_.rules[static_cast<std::size_t>(s.rule)];
      if (!sub.synthetic) {
        out.push_back(convert(c.node, s.source, groups));
        continue;
      }
      std::vector<std::pair<int, std::size_t>> iters;
      iterations(c.node, iters);
      for (std::size_t it = 0; it < iters.size(); ++it) {
        std::vector<GroupStep> inner = groups;
        inner.push_back(GroupStep{sub.group, it});
        append(iters[it].first, iters[it].second, inner, out);
      }
    }
  }

  // A synthetic node is either empty, one body, or (self, body): collect
  // bodies left to right as (node, first body child).
  void iterations(int idx, std::vector<std::pair<int, std::size_t>>& out) {
    const auto& n = arena_[static_cast<std::size_t>(idx)];
    const Prod& p = g_.prods[static_cast<std::size_t>(n.prod)];
    if (p.syms.empty()) return;
    if (!p.syms[0].terminal && p.syms[0].rule == p.rule) {
      iterations(n.children[0].node, out);
      out.emplace_back(idx, 1);
      return;
    }
    out.emplace_back(idx, 0);
  }

  std::size_t begin_of(std::size_t i) const {
    if (i < tokens_.size()) return tokens_[i].offset;
    if (tokens_.empty()) return 0;
    return tokens_.back().offset + tokens_.back().lexeme.size();
  }

  void set_bytes(ParseNode& n) const {
    n.begin = begin_of(n.first_token);
    n.end = n.end_token > n.first_token
                ? tokens_[n.end_token - 1].offset + tokens_[n.end_token - 1].lexeme.size()
                : n.begin;
  }

  const EarleyParser::Impl& g_;
  const std::vector<TreeBuilder::INode>& arena_;
  std::span<const Token> tokens_;
};

}  // namespace

EarleyParser::EarleyParser(const Grammar& g) : impl_(std::make_unique<Impl>(g)) {}
EarleyParser::~EarleyParser() = default;
EarleyParser::EarleyParser(EarleyParser&&) noexcept = default;
EarleyParser& EarleyParser::operator=(EarleyParser&&) noexcept = default;

bool EarleyParser::recognize(std::string_view start, std::span<const Token> tokens) const {
  int s = impl_->start_rule(start);
  if (s < 0) return false;
  return impl_->accepted(impl_->run(s, tokens), s);
}

ParseOutcome EarleyParser::parse(std::string_view start, std::span<const Token> tokens,
                                 const ParseOptions& opts) const {
  int s = impl_->start_rule(start);
  if (s < 0)
    throw DiagnosticError(
        make_error("E_NO_START", "start rule '" + std::string(start) + "' is not defined"));
  auto chart = impl_->run(s, tokens);
  if (!impl_->accepted(chart, s)) {
    std::size_t at = chart.furthest;
    Diagnostic d;
    if (at < tokens.size()) {
      const Token& t = tokens[at];
      d = make_error("E_PARSE",
                     "unexpected " + (t.literal ? quote_literal(t.terminal) : t.terminal) + " '" +
                         t.lexeme + "' at token " + std::to_string(at + 1),
                     t.span);
    } else {
      SourceSpan sp = tokens.empty() ? SourceSpan{} : tokens.back().span;
      if (sp.valid()) {
        sp.start_line = sp.end_line;
        sp.start_col = sp.end_col;
      }
      d = make_error("E_PARSE",
                     "unexpected end of input at token " + std::to_string(tokens.size() + 1), sp);
    }
    throw DiagnosticError(std::move(d));
  }

  TreeBuilder builder(*impl_, chart, tokens);
  auto root = builder.build(s, 0, tokens.size());
  if (!root)
    throw DiagnosticError(make_error("E_PARSE", "input accepted but no finite derivation found"));

  ParseOutcome out;
  if (builder.ambiguous) {
    std::string msg = "input is ambiguous (first at rule '" + builder.ambiguity_at +
                      "', token " + std::to_string(builder.ambiguity_token + 1) +
                      "); chose lowest production index, then shortest leading spans";
    SourceSpan sp = builder.ambiguity_token < tokens.size() ? tokens[builder.ambiguity_token].span
                                                            : SourceSpan{};
    if (opts.strict_ambiguity) throw DiagnosticError(make_error("E_AMBIGUOUS", msg, sp));
    out.diagnostics.push_back(make_warning("W_AMBIGUOUS", msg, sp));
  }
  TreeConverter conv(*impl_, builder.arena, tokens);
  out.tree = conv.convert(*root, NodeId{}, {});
  return out;
}

ParseOutcome parse_input(const Grammar& g, std::string_view start, std::span<const Token> tokens,
                         const ParseOptions& opts) {
  return EarleyParser(g).parse(start, tokens, opts);
}

namespace {

void yield_into(const ParseNode& n, std::vector<Token>& out) {
  if (n.kind == ParseNode::Kind::Leaf) {
    out.push_back(n.token);
    return;
  }
  for (const ParseNode& c : n.children) yield_into(c, out);
}

}  // namespace

std::vector<Token> leaf_yield(const ParseNode& tree) {
  std::vector<Token> out;
  yield_into(tree, out);
  return out;
}

std::size_t node_count(const ParseNode& tree) {
  std::size_t n = 1;
  for (const ParseNode& c : tree.children) n += node_count(c);
  return n;
}

}  // namespace gw
