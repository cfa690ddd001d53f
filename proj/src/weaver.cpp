#include "weaver.hpp"

#include <functional>
#include <set>

#include "grammar_reader.hpp"
#include "json.hpp"

namespace gw {

// ---------------------------------------------------------------------------
// Matching

namespace {

class PatternMatcher {
 public:
  using Cont = std::function<void()>;

  // Matches pats[pi..] against terms[ti..], anchored at the end.
  void seq(const std::vector<TermPattern>& pats, std::size_t pi, const std::vector<Term>& terms,
           std::size_t ti, bool top, const Cont& k) {
    if (pi == pats.size()) {
      if (ti == terms.size()) k();
      return;
    }
    const TermPattern& p = pats[pi];
    if (p.kind == TermPattern::Kind::Gap) {
      // Shortest gap first.
      for (std::size_t n = 0; ti + n <= terms.size(); ++n) {
        if (top) spans.emplace_back(ti, ti + n);
        seq(pats, pi + 1, terms, ti + n, top, k);
        if (top) spans.pop_back();
      }
      return;
    }
    if (ti >= terms.size()) return;
    const Term& t = terms[ti];
    single(p, t, [&] {
      if (!p.binder.empty()) bound.emplace_back(p.binder, t.id);
      if (top) spans.emplace_back(ti, ti + 1);
      seq(pats, pi + 1, terms, ti + 1, top, k);
      if (top) spans.pop_back();
      if (!p.binder.empty()) bound.pop_back();
    });
  }

  std::vector<std::pair<std::string, NodeId>> bound;
  std::vector<std::pair<std::size_t, std::size_t>> spans;

 private:
  void single(const TermPattern& p, const Term& t, const Cont& k) {
    using K = TermPattern::Kind;
    switch (p.kind) {
      case K::AnyOne:
        k();
        return;
      case K::Token:
        if (const auto* tok = std::get_if<TokenRef>(&t.kind); tok && tok->name == p.text) k();
        return;
      case K::Literal:
        if (const auto* lit = std::get_if<LiteralRef>(&t.kind); lit && lit->text == p.text) k();
        return;
      case K::Rule:
        if (const auto* rr = std::get_if<RuleRef>(&t.kind); rr && rr->name == p.text) k();
        return;
      case K::Group:
        if (const Group* grp = t.group(); grp && grp->rep == p.rep)
          seq(p.body, 0, grp->body, 0, false, k);
        return;
      case K::Gap:
        return;
    }
  }
};

}  // namespace

std::vector<MatchResult> match_pointcut(const Grammar& g, const Pointcut& pc,
                                        std::size_t block_index) {
  std::vector<MatchResult> out;
  for (const Rule& rule : g.rules) {
    if (pc.rule_selector != "*" && pc.rule_selector != rule.name) continue;
    for (const Production& prod : rule.productions) {
      std::set<std::map<std::string, NodeId>> seen;
      PatternMatcher m;
      m.seq(pc.pattern.elements, 0, prod.terms, 0, true, [&] {
        MatchResult r;
        r.block = block_index;
        r.rule = rule.id;
        r.production = prod.id;
        r.bindings["rule"] = rule.id;
        r.bindings["grammar"] = g.root_id;
        if (!pc.binder.empty()) r.bindings[pc.binder] = prod.id;
        for (const auto& [name, id] : m.bound) r.bindings[name] = id;
        if (!seen.insert(r.bindings).second) return;
        r.element_spans = m.spans;
        out.push_back(std::move(r));
      });
    }
  }
  return out;
}

namespace {

void find_symbol(const std::vector<Term>& terms, const Reference& ref, std::vector<NodeId>& hits) {
  for (const Term& t : terms) {
    bool hit = false;
    if (ref.literal) {
      const auto* lit = std::get_if<LiteralRef>(&t.kind);
      hit = lit && lit->text == ref.name;
    } else if (is_token_name(ref.name)) {
      const auto* tok = std::get_if<TokenRef>(&t.kind);
      hit = tok && tok->name == ref.name;
    } else {
      const auto* rr = std::get_if<RuleRef>(&t.kind);
      hit = rr && rr->name == ref.name;
    }
    if (hit) hits.push_back(t.id);
    if (const Group* grp = t.group()) find_symbol(grp->body, ref, hits);
  }
}

std::string describe(const Reference& ref) {
  return "@" + (ref.literal ? quote_literal(ref.name) : ref.name);
}

}  // namespace

NodeId resolve_reference(const Grammar& g, const MatchResult& m, const Reference& ref) {
  if (!ref.literal) {
    if (auto it = m.bindings.find(ref.name); it != m.bindings.end()) return it->second;
  }
  auto loc = locate(g, m.production);
  if (!loc)
    throw DiagnosticError(make_error("E_UNKNOWN_REF", "matched production no longer exists", ref.span));
  std::vector<NodeId> hits;
  find_symbol(deref(g, *loc).production->terms, ref, hits);
  if (hits.empty())
    throw DiagnosticError(make_error(
        "E_UNKNOWN_REF", describe(ref) + " is neither a binder nor a symbol of the matched production",
        ref.span, format_path(g, *loc)));
  if (hits.size() > 1)
    throw DiagnosticError(make_error(
        "E_AMBIGUOUS_REF",
        describe(ref) + " occurs " + std::to_string(hits.size()) +
            " times in the matched production; bind the intended one with $name=",
        ref.span, format_path(g, *loc)));
  return hits.front();
}

// ---------------------------------------------------------------------------
// Trace export

std::string trace_record_to_json(const TraceRecord& r) {
  nlohmann::ordered_json j;
  j["aspect"] = r.aspect;
  j["block"] = r.block;
  j["verb"] = r.verb;
  j["target_path"] = r.target_path;
  j["new_paths"] = r.new_paths;
  j["removed_paths"] = r.removed_paths;
  j["target_id"] = r.target.value;
  auto ids = [](const std::vector<NodeId>& v) {
    std::vector<std::uint64_t> out;
    for (NodeId id : v) out.push_back(id.value);
    return out;
  };
  j["new_ids"] = ids(r.created);
  j["removed_ids"] = ids(r.removed);
  return j.dump();
}

std::string trace_to_jsonl(const WeaveTrace& trace) {
  std::string out;
  for (const TraceRecord& r : trace) out += trace_record_to_json(r) + '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Application

namespace {

template <class Node>
std::vector<NodeId> ids_of(const std::vector<Node>& nodes) {
  std::vector<NodeId> top;
  std::vector<NodeId> rest;
  for (const Node& n : nodes) {
    std::vector<NodeId> all;
    collect_ids(n, all);
    top.push_back(all.front());
    rest.insert(rest.end(), all.begin() + 1, all.end());
  }
  top.insert(top.end(), rest.begin(), rest.end());
  return top;
}

template <class Node>
std::vector<NodeId> ids_of(const Node& n) {
  std::vector<NodeId> out;
  collect_ids(n, out);
  return out;
}

FragmentKind expected_fragment(NodeKind k) {
  switch (k) {
    case NodeKind::Term: return FragmentKind::Terms;
    case NodeKind::Production: return FragmentKind::Productions;
    default: return FragmentKind::Rules;
  }
}

class Applier {
 public:
  Applier(Grammar& g, const Grammar& snapshot, std::string aspect)
      : g_(g), snapshot_(snapshot), aspect_(std::move(aspect)) {}

  TraceRecord apply(std::size_t block, NodeId target, const Action& a) {
    TraceRecord rec;
    rec.aspect = aspect_;
    rec.block = block;
    rec.verb = std::string(verb_name(a.verb));
    rec.target = target;
    rec.target_path = path_in_snapshot(target);

    auto loc = locate(g_, target);
    if (!loc)
      throw DiagnosticError(make_error(
          "E_CONFLICT",
          "target " + rec.target_path + " was replaced or removed by an earlier action of this aspect",
          a.span));
    if (loc->kind == NodeKind::Grammar)
      throw DiagnosticError(make_error(
          "E_FRAGMENT_KIND", "the grammar root cannot be the target of syntactic advice", a.span));

    switch (loc->kind) {
      case NodeKind::Term: apply_term(*loc, a, rec); break;
      case NodeKind::Production: apply_production(*loc, a, rec); break;
      case NodeKind::Rule: apply_rule(*loc, a, rec); break;
      case NodeKind::Grammar: break;
    }
    for (NodeId id : rec.removed) rec.removed_paths.push_back(path_in_snapshot(id));
    return rec;
  }

  TraceRecord add(std::size_t block, const AddDirective& d) {
    TraceRecord rec;
    rec.aspect = aspect_;
    rec.block = block;
    rec.verb = "add";
    rec.target = g_.root_id;
    rec.target_path = "$grammar";
    if (classify_fragment(d.fragment.text) != FragmentKind::Rules)
      throw DiagnosticError(make_error("E_FRAGMENT_KIND", "'add' expects complete rule definitions",
                                       d.fragment.span));
    auto rules = parse_rule_fragment(d.fragment.text, origin(d.fragment), g_.next_node_id);
    rec.created = ids_of(rules);
    rec.top_level_created = rules.size();
    for (Rule& r : rules) g_.rules.push_back(std::move(r));
    return rec;
  }

 private:
  std::string path_in_snapshot(NodeId id) const {
    if (auto p = path_of(snapshot_, id)) return *p;
    if (auto p = path_of(g_, id)) return *p;
    return to_string(id);
  }

  static FragmentOrigin origin(const Fragment& f) {
    return FragmentOrigin{f.span.file, f.span.start_line, f.span.start_col};
  }

  void check_kind(const Action& a, NodeKind target_kind) const {
    FragmentKind want = expected_fragment(target_kind);
    FragmentKind got = classify_fragment(a.fragment->text);
    if (want != got)
      throw DiagnosticError(make_error(
          "E_FRAGMENT_KIND",
          "fragment is a " + std::string(fragment_kind_name(got)) + " but the target is a " +
              std::string(node_kind_name(target_kind)) + " (expected a " +
              std::string(fragment_kind_name(want)) + ")",
          a.fragment->span));
  }

  // Shared list surgery for the three node kinds.
  template <class Node, class Parse, class Container>
  void splice(Container& list, std::size_t idx, NodeId target, const Action& a, TraceRecord& rec,
              Parse parse) {
    if (a.verb == Verb::Remove) {
      rec.removed = ids_of(list[idx]);
      list.erase(list.begin() + static_cast<std::ptrdiff_t>(idx));
      return;
    }
    std::vector<Node> fresh = parse(a.fragment->text, origin(*a.fragment), g_.next_node_id);
    rec.created = ids_of(fresh);
    rec.top_level_created = fresh.size();
    NodeId last = fresh.back().id;
    std::size_t at = idx;
    if (a.verb == Verb::Instead) {
      rec.removed = ids_of(list[idx]);
      list.erase(list.begin() + static_cast<std::ptrdiff_t>(idx));
    } else if (a.verb == Verb::After) {
      at = idx + 1;
    }
    list.insert(list.begin() + static_cast<std::ptrdiff_t>(at),
                std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
    if (a.verb == Verb::After) last_after_[target] = last;
  }

  // Where an `after` insertion goes: behind whatever was last inserted after
  // the same anchor, so repeated insertions keep action order.
  NodeLocation after_anchor(NodeId target, const NodeLocation& loc) const {
    if (auto it = last_after_.find(target); it != last_after_.end())
      if (auto l = locate(g_, it->second); l && l->kind == loc.kind) return *l;
    return loc;
  }

  void apply_term(NodeLocation loc, const Action& a, TraceRecord& rec) {
    if (a.verb != Verb::Remove) check_kind(a, NodeKind::Term);
    if (a.verb == Verb::After) loc = after_anchor(rec.target, loc);
    auto& list = term_container(g_, loc);
    splice<Term>(list, loc.terms.back(), rec.target, a, rec, parse_term_fragment);
    if (list.empty() && loc.terms.size() > 1)
      throw DiagnosticError(make_error("E_EMPTY_GROUP",
                                       "removing " + rec.target_path + " leaves its group empty",
                                       a.span, rec.target_path));
  }

  void apply_production(NodeLocation loc, const Action& a, TraceRecord& rec) {
    if (a.verb != Verb::Remove) check_kind(a, NodeKind::Production);
    if (a.verb == Verb::After) loc = after_anchor(rec.target, loc);
    Rule& rule = rule_at(g_, loc);
    splice<Production>(rule.productions, loc.production, rec.target, a, rec,
                       parse_production_fragment);
    if (rule.productions.empty())
      throw DiagnosticError(make_error("E_EMPTY_RULE",
                                       "rule '" + rule.name + "' would be left with no productions",
                                       a.span, rule.name));
  }

  void apply_rule(NodeLocation loc, const Action& a, TraceRecord& rec) {
    if (a.verb != Verb::Remove) check_kind(a, NodeKind::Rule);
    if (a.verb == Verb::After) loc = after_anchor(rec.target, loc);
    splice<Rule>(g_.rules, loc.rule, rec.target, a, rec, parse_rule_fragment);
  }

  Grammar& g_;
  const Grammar& snapshot_;
  std::string aspect_;
  std::map<NodeId, NodeId> last_after_;
};

void fill_new_paths(const Grammar& g, TraceRecord& rec) {
  rec.new_paths.clear();
  for (NodeId id : rec.created) {
    auto p = path_of(g, id);
    rec.new_paths.push_back(p ? *p : to_string(id));
  }
}

struct Planned {
  std::size_t block;
  const Action* action = nullptr;
  const AddDirective* add = nullptr;
  NodeId target;
};

bool destructive(Verb v) { return v == Verb::Instead || v == Verb::Remove; }

std::vector<TraceRecord> weave_one(Grammar& g, const SyntacticAspect& aspect) {
  const Grammar snapshot = g;
  Diagnostics errors;
  std::vector<Planned> plan;

  // Phase 1: match everything against the snapshot.
  for (std::size_t b = 0; b < aspect.directives.size(); ++b) {
    if (const auto* add = std::get_if<AddDirective>(&aspect.directives[b])) {
      plan.push_back(Planned{b, nullptr, add, snapshot.root_id});
      continue;
    }
    const auto& mb = std::get<MatchBlock>(aspect.directives[b]);
    auto matches = match_pointcut(snapshot, mb.pointcut, b);
    if (matches.empty() && !mb.pointcut.optional) {
      errors.push_back(make_error("E_NO_MATCH",
                                  "block " + std::to_string(b) + " (" + to_source(mb.pointcut) +
                                      ") matches nothing",
                                  mb.pointcut.span));
      continue;
    }
    for (const MatchResult& m : matches) {
      for (const Action& a : mb.actions) {
        try {
          plan.push_back(Planned{b, &a, nullptr, resolve_reference(snapshot, m, a.target)});
        } catch (const DiagnosticError& e) {
          errors.insert(errors.end(), e.diagnostics().begin(), e.diagnostics().end());
        }
      }
    }
  }

  // Two destructive actions on one node: one diagnostic per node.
  std::map<NodeId, std::vector<const Planned*>> destroyers;
  for (const Planned& p : plan)
    if (p.action && destructive(p.action->verb)) destroyers[p.target].push_back(&p);
  for (const auto& [id, list] : destroyers) {
    if (list.size() < 2) continue;
    std::string what;
    for (const Planned* p : list) {
      if (!what.empty()) what += ", ";
      what += std::string(verb_name(p->action->verb)) + " (block " + std::to_string(p->block) + ")";
    }
    auto path = path_of(snapshot, id);
    errors.push_back(make_error("E_CONFLICT",
                                "conflicting actions on " + path.value_or(to_string(id)) + ": " + what,
                                list[1]->action->span, path.value_or("")));
  }
  if (!errors.empty()) throw DiagnosticError(std::move(errors));

  // Phase 2: apply in directive / match / action order.
  Applier applier(g, snapshot, aspect.name);
  std::vector<TraceRecord> records;
  for (const Planned& p : plan)
    records.push_back(p.add ? applier.add(p.block, *p.add) : applier.apply(p.block, p.target, *p.action));
  for (TraceRecord& r : records) fill_new_paths(g, r);

  Diagnostics wf = check_well_formed(g);
  if (has_errors(wf)) throw DiagnosticError(std::move(wf));
  return records;
}

}  // namespace

ApplyResult apply_action(const Grammar& g, const MatchResult& m, const Action& a,
                         const std::string& aspect_name) {
  ApplyResult out{g, {}};
  NodeId target = resolve_reference(g, m, a.target);
  Applier applier(out.grammar, g, aspect_name);
  TraceRecord rec = applier.apply(m.block, target, a);
  fill_new_paths(out.grammar, rec);
  out.records.push_back(std::move(rec));
  return out;
}

WeaveResult weave(const Grammar& g, const std::vector<SyntacticAspect>& aspects) {
  WeaveResult out{g, {}};
  for (const SyntacticAspect& a : aspects) {
    auto records = weave_one(out.grammar, a);
    out.trace.insert(out.trace.end(), std::make_move_iterator(records.begin()),
                     std::make_move_iterator(records.end()));
  }
  return out;
}

}  // namespace gw
